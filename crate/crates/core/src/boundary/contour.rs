//! Marching squares for the zero level of a sampled scalar field.

use std::collections::BTreeMap;

use super::Grid;

/// Key of a grid edge: horizontal edges join `(i, j)` and `(i + 1, j)`,
/// vertical edges join `(i, j)` and `(i, j + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Zero-level polylines in fractional grid-index coordinates `(i, j)`.
///
/// A vertex is "inside" when its value is strictly positive. Crossings are
/// placed by linear interpolation along cell edges; saddle cells are resolved
/// by the sign of the cell-centre average. Closed loops repeat their first
/// point at the end.
pub fn march_zero(grid: &Grid) -> Vec<Vec<(f64, f64)>> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let pos = |i: usize, j: usize| grid.get(i, j) > 0.0;
    let mut links: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
    let mut link = |a: Edge, b: Edge| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let s = [pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)];
            // bottom, right, top, left
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let crossed: Vec<usize> = (0..4).filter(|&e| s[e] != s[(e + 1) % 4]).collect();
            match crossed.len() {
                0 => {}
                2 => link(edges[crossed[0]], edges[crossed[1]]),
                4 => {
                    let centre = 0.25
                        * (grid.get(i, j)
                            + grid.get(i + 1, j)
                            + grid.get(i + 1, j + 1)
                            + grid.get(i, j + 1));
                    if (centre > 0.0) == s[0] {
                        // corners 0 and 2 joined through the centre
                        link(edges[0], edges[1]);
                        link(edges[2], edges[3]);
                    } else {
                        link(edges[3], edges[0]);
                        link(edges[1], edges[2]);
                    }
                }
                _ => unreachable!("a cell has an even number of sign changes"),
            }
        }
    }

    let point = |e: Edge| -> (f64, f64) {
        let (a, b, (i, j), horizontal) = match e {
            Edge::H(i, j) => (grid.get(i, j), grid.get(i + 1, j), (i, j), true),
            Edge::V(i, j) => (grid.get(i, j), grid.get(i, j + 1), (i, j), false),
        };
        let t = if a == b { 0.5 } else { (a / (a - b)).clamp(0.0, 1.0) };
        if horizontal {
            (i as f64 + t, j as f64)
        } else {
            (i as f64, j as f64 + t)
        }
    };

    let mut visited: BTreeMap<Edge, bool> = links.keys().map(|&k| (k, false)).collect();
    let mut lines = Vec::new();
    let walk = |start: Edge, visited: &mut BTreeMap<Edge, bool>| {
        let mut chain = vec![start];
        visited.insert(start, true);
        let mut prev: Option<Edge> = None;
        let mut cur = start;
        loop {
            let next = links[&cur]
                .iter()
                .copied()
                .find(|n| Some(*n) != prev && !visited[n])
                .or_else(|| {
                    // closing a loop back onto the start
                    links[&cur]
                        .iter()
                        .copied()
                        .find(|n| *n == start && Some(*n) != prev && chain.len() > 2)
                });
            match next {
                Some(n) if n == start => {
                    chain.push(start);
                    break;
                }
                Some(n) => {
                    visited.insert(n, true);
                    chain.push(n);
                    prev = Some(cur);
                    cur = n;
                }
                None => break,
            }
        }
        chain.into_iter().map(point).collect::<Vec<_>>()
    };

    // open chains start at degree-one edges, then the remaining closed loops
    let ends: Vec<Edge> = links
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    for e in ends {
        if !visited[&e] {
            lines.push(walk(e, &mut visited));
        }
    }
    let rest: Vec<Edge> = links.keys().copied().collect();
    for e in rest {
        if !visited[&e] {
            lines.push(walk(e, &mut visited));
        }
    }
    lines
}
