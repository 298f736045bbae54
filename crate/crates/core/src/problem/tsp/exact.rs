use super::{TooLarge, Tour, TspInstance};

pub const HELD_KARP_MAX_NODES: usize = 13;

/// Held-Karp dynamic program. Exact, O(2^n n^2).
pub fn exact_solve_small(inst: &TspInstance) -> Result<(Tour, f64), TooLarge> {
    let n = inst.len();
    if n > HELD_KARP_MAX_NODES {
        return Err(TooLarge(n));
    }
    let d = inst.distance();
    // node 0 is fixed as the start; subsets range over nodes 1..n
    let m = n - 1;
    let full = 1usize << m;
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = d.get(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = cost[mask * m + j];
            if !here.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let c = here + d.get(j + 1, k + 1);
                if c < cost[next * m + k] {
                    cost[next * m + k] = c;
                    parent[next * m + k] = j;
                }
            }
        }
    }
    let last_mask = full - 1;
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..m {
        let c = cost[last_mask * m + j] + d.get(j + 1, 0);
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = last_mask;
    let mut j = last;
    while j != usize::MAX {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        j = p;
    }
    order.push(0);
    order.reverse();
    Ok((Tour(order), best))
}
