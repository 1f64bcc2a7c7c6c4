//! Random relocations and exchanges.

use rand::Rng;

use crate::eval::{scan_insertions, Insertion, State};
use crate::model::{RequestId, VehicleId};

/// A feasible insertion of `r` into the route of `v` drawn uniformly from
/// all feasible position pairs.
pub fn random_insertion<R: Rng>(st: &State<'_>, r: RequestId, v: VehicleId, rng: &mut R) -> Option<Insertion> {
    let mut n = 0usize;
    scan_insertions(st, r, v, || {
        n += 1;
        false
    });
    if n == 0 {
        return None;
    }
    let pick = rng.gen_range(0..n);
    let mut seen = 0usize;
    scan_insertions(st, r, v, || {
        seen += 1;
        seen == pick + 1
    })
}

fn random_served<R: Rng>(st: &State<'_>, served: &[RequestId], rng: &mut R) -> Option<(RequestId, VehicleId)> {
    if served.is_empty() {
        return None;
    }
    let r = served[rng.gen_range(0..served.len())];
    st.vehicle_of_request(r).map(|v| (r, v))
}

fn other_vehicle<R: Rng>(st: &State<'_>, v: VehicleId, allow_empty: bool, rng: &mut R) -> Option<VehicleId> {
    let pool: Vec<VehicleId> =
        st.vehicles().iter().copied().filter(|&w| w != v && (allow_empty || !st.is_route_empty(w))).collect();
    if pool.is_empty() {
        return None;
    }
    Some(pool[rng.gen_range(0..pool.len())])
}

/// Moves a random request to a random feasible position of another random
/// route, empty routes included when `allow_empty` is set.
pub fn relocate<R: Rng>(st: &mut State<'_>, served: &[RequestId], allow_empty: bool, rng: &mut R) -> bool {
    let Some((r, v)) = random_served(st, served, rng) else { return false };
    let Some(w) = other_vehicle(st, v, allow_empty, rng) else { return false };
    st.checkpoint();
    st.remove_request(r);
    match random_insertion(st, r, w, rng) {
        Some(ins) => {
            st.apply(&ins);
            st.commit();
            true
        }
        None => {
            st.rollback();
            false
        }
    }
}

/// Swaps two random requests of distinct routes, each inserted at a random
/// feasible position.
pub fn exchange<R: Rng>(st: &mut State<'_>, served: &[RequestId], rng: &mut R) -> bool {
    let Some((r1, v1)) = random_served(st, served, rng) else { return false };
    let Some((r2, v2)) = random_served(st, served, rng) else { return false };
    if v1 == v2 {
        return false;
    }
    st.checkpoint();
    st.remove_request(r1);
    st.remove_request(r2);
    let Some(a) = random_insertion(st, r1, v2, rng) else {
        st.rollback();
        return false;
    };
    st.apply(&a);
    let Some(b) = random_insertion(st, r2, v1, rng) else {
        st.rollback();
        return false;
    };
    st.apply(&b);
    st.commit();
    true
}

/// `moves` perturbation attempts, each a relocation with probability
/// `relocate_share` and an exchange otherwise. Failed attempts are skipped.
pub fn perturb<R: Rng>(st: &mut State<'_>, moves: usize, relocate_share: f64, allow_empty: bool, rng: &mut R) -> usize {
    let served: Vec<RequestId> = st.members().filter(|r| !st.unassigned().contains(r)).collect();
    let mut done = 0;
    for _ in 0..moves {
        let ok = if rng.gen::<f64>() < relocate_share {
            relocate(st, &served, allow_empty, rng)
        } else {
            exchange(st, &served, rng)
        };
        done += ok as usize;
    }
    done
}
