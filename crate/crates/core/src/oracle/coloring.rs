/// Presses needed to move a node from color `from` to `to` when interact
/// cycles `0 -> 1 -> ... -> k -> 1`.
pub fn presses_between(k: u8, from: u8, to: u8) -> u32 {
    if from == 0 {
        to as u32
    } else {
        (to as u32 + k as u32 - from as u32) % k as u32
    }
}

/// Proper coloring with palette `1..=k` that minimizes total presses from
/// the current colors. Exhaustive branch and bound; graphs here are tiny.
pub fn cheapest_coloring(k: u8, current: &[u8], edges: &[(usize, usize)]) -> Option<Vec<u8>> {
    let m = current.len();
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut best: Option<(u32, Vec<u8>)> = None;
    let mut assign = vec![0u8; m];
    fn search(
        i: usize,
        cost: u32,
        k: u8,
        current: &[u8],
        adj: &[Vec<usize>],
        assign: &mut Vec<u8>,
        best: &mut Option<(u32, Vec<u8>)>,
    ) {
        if best.as_ref().is_some_and(|(c, _)| cost >= *c) {
            return;
        }
        if i == assign.len() {
            *best = Some((cost, assign.clone()));
            return;
        }
        for color in 1..=k {
            if adj[i].iter().any(|&j| j < i && assign[j] == color) {
                continue;
            }
            assign[i] = color;
            search(i + 1, cost + presses_between(k, current[i], color), k, current, adj, assign, best);
        }
        assign[i] = 0;
    }
    search(0, 0, k, current, &adj, &mut assign, &mut best);
    best.map(|(_, a)| a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn press_counts_follow_the_cycle() {
        assert_eq!(presses_between(3, 0, 2), 2);
        assert_eq!(presses_between(3, 3, 1), 1);
        assert_eq!(presses_between(3, 2, 2), 0);
        assert_eq!(presses_between(3, 2, 1), 2);
    }

    #[test]
    fn triangle_needs_three_colors() {
        let edges = [(0, 1), (1, 2), (0, 2)];
        assert_eq!(cheapest_coloring(2, &[0, 0, 0], &edges), None);
        let c = cheapest_coloring(3, &[0, 0, 0], &edges).unwrap();
        assert_eq!(c.iter().map(|x| *x as u32).sum::<u32>(), 6);
    }

    #[test]
    fn already_proper_costs_nothing() {
        let c = cheapest_coloring(2, &[1, 2, 1], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(c, vec![1, 2, 1]);
    }
}
