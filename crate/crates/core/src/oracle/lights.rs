//! Lights Out over GF(2): one unknown per board cell, one equation per light.

/// Minimum-size set of presses (row-major indices) that turns every light
/// off on an `n x n` board, or `None` when the pattern is unsolvable.
pub fn solve_presses(n: usize, on: &[bool]) -> Option<Vec<usize>> {
    let cells = n * n;
    assert!(cells <= 63, "board too large for bitmask elimination");
    let rhs_bit = 1u64 << cells;
    let mut rows: Vec<u64> = (0..cells)
        .map(|j| {
            let (c, r) = ((j % n) as i64, (j / n) as i64);
            let mut row = 0u64;
            for (dc, dr) in [(0, 0), (0, -1), (0, 1), (-1, 0), (1, 0)] {
                let (cc, rr) = (c + dc, r + dr);
                if cc >= 0 && rr >= 0 && cc < n as i64 && rr < n as i64 {
                    row |= 1 << (rr as usize * n + cc as usize);
                }
            }
            if on[j] {
                row |= rhs_bit;
            }
            row
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..cells {
        let Some(found) = (rank..cells).find(|r| rows[*r] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, found);
        for r in 0..cells {
            if r != rank && rows[r] >> col & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r & rhs_bit != 0) {
        return None;
    }
    let free: Vec<usize> = (0..cells).filter(|c| !pivots.contains(c)).collect();
    let assemble = |free_values: u64| -> u64 {
        let mut x = 0u64;
        for (k, f) in free.iter().enumerate() {
            if free_values >> k & 1 == 1 {
                x |= 1 << f;
            }
        }
        for (r, &col) in pivots.iter().enumerate() {
            let row = rows[r];
            let mut bit = (row & rhs_bit != 0) as u64;
            for f in &free {
                if row >> f & 1 == 1 {
                    bit ^= x >> f & 1;
                }
            }
            x |= bit << col;
        }
        x
    };
    let best = (0..1u64 << free.len()).map(assemble).min_by_key(|x| (x.count_ones(), *x))?;
    Some((0..cells).filter(|i| best >> i & 1 == 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(n: usize, on: &mut [bool], press: usize) {
        let (c, r) = ((press % n) as i64, (press / n) as i64);
        for (dc, dr) in [(0, 0), (0, -1), (0, 1), (-1, 0), (1, 0)] {
            let (cc, rr) = (c + dc, r + dr);
            if cc >= 0 && rr >= 0 && cc < n as i64 && rr < n as i64 {
                on[rr as usize * n + cc as usize] ^= true;
            }
        }
    }

    #[test]
    fn single_press_is_undone_by_itself() {
        let mut on = vec![false; 9];
        apply(3, &mut on, 4);
        assert_eq!(solve_presses(3, &on), Some(vec![4]));
    }

    #[test]
    fn solutions_clear_the_board_for_every_size() {
        for n in 3..=6 {
            for seed in 0..20u64 {
                let mut on = vec![false; n * n];
                let mut rng = crate::rng::StreamRng::new(seed);
                for _ in 0..5 {
                    apply(n, &mut on, rng.index(n * n));
                }
                let presses = solve_presses(n, &on).expect("scrambled board is solvable");
                for p in presses {
                    apply(n, &mut on, p);
                }
                assert!(on.iter().all(|b| !b), "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn four_by_four_has_unsolvable_patterns() {
        let mut on = vec![false; 16];
        on[0] = true;
        assert_eq!(solve_presses(4, &on), None);
    }
}
