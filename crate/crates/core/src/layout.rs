// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Stress-minimising (Kamada–Kawai) layout with the average k-number as a
//! third coordinate.
//!
//! Every pair of nodes in a connected component is joined by a spring whose
//! rest length is their geodesic distance `d` and whose stiffness is
//! `d^-2`. The stress is lowered by node-wise majorization moves, each of
//! which cannot increase it.

use std::collections::VecDeque;
use std::io::Write;

use rand::Rng;

use crate::decomposition::connected_components;
use crate::error::Result;
use crate::generators::{rng, Seed};
use crate::graph::{Graph, GraphView};
use crate::hierarchy::KNumberMap;
use crate::Ratio;

/// Relative stress change below which iteration stops.
pub const TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 1000;
/// Horizontal gap between the layouts of separate components.
const COMPONENT_GAP: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayoutPoint {
    pub x: f64,
    pub y: f64,
    pub z: Option<Ratio>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayoutTable {
    pub points: Vec<LayoutPoint>,
    /// Final stress summed over components.
    pub stress: f64,
    /// Largest iteration count used by any component.
    pub iterations: usize,
}

impl LayoutTable {
    /// `node,x,y,z`; `z` as a decimal.
    pub fn write_csv<W: Write>(&self, g: &Graph, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["node", "x", "y", "z"])?;
        for (u, p) in self.points.iter().enumerate() {
            let z = p.z.map_or_else(String::new, |r| (*r.numer() as f64 / *r.denom() as f64).to_string());
            out.write_record([g.label(u).to_string(), format!("{:.6}", p.x), format!("{:.6}", p.y), z])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn distances(g: &Graph) -> Vec<u32> {
    let n = g.node_count();
    let mut d = vec![u32::MAX; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut d[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for y in g.neighbors(x) {
                if row[y] == u32::MAX {
                    row[y] = row[x] + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    d
}

fn stress(pos: &[[f64; 2]], d: &[u32]) -> f64 {
    let n = pos.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dij = d[i * n + j] as f64;
            let len = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]);
            s += (len - dij) * (len - dij) / (dij * dij);
        }
    }
    s
}

/// Layout of one connected graph: positions, stress, iterations.
fn component_layout(g: &Graph, rng: &mut impl Rng) -> (Vec<[f64; 2]>, f64, usize) {
    let n = g.node_count();
    let side = (n as f64).sqrt();
    let mut pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side]).collect();
    if n < 2 {
        return (vec![[0.0, 0.0]; n], 0.0, 0);
    }
    let d = distances(g);
    let mut current = stress(&pos, &d);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && current > 0.0 {
        iterations += 1;
        for i in 0..n {
            let (mut nx, mut ny, mut den) = (0.0, 0.0, 0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let dij = d[i * n + j] as f64;
                let w = 1.0 / (dij * dij);
                let (dx, dy) = (pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
                let len = dx.hypot(dy);
                let (px, py) = if len > 1e-12 { (dx * dij / len, dy * dij / len) } else { (0.0, 0.0) };
                nx += w * (pos[j][0] + px);
                ny += w * (pos[j][1] + py);
                den += w;
            }
            pos[i] = [nx / den, ny / den];
        }
        let next = stress(&pos, &d);
        let change = (current - next).abs() / current;
        current = next;
        if change < TOLERANCE {
            break;
        }
    }
    (pos, current, iterations)
}

/// Seeded stress layout of `g` with `z` taken from `knumbers`. Components
/// are laid out separately and placed side by side, largest first.
pub fn layout_scatter(g: &Graph, knumbers: &KNumberMap, seed: Seed) -> LayoutTable {
    let mut comps = connected_components(g);
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut rng = rng(seed);
    let mut points = vec![LayoutPoint { x: 0.0, y: 0.0, z: None }; g.node_count()];
    let (mut offset, mut total, mut iterations) = (0.0, 0.0, 0);
    for comp in comps {
        let (pos, s, it) = component_layout(&g.induced_subgraph(&comp), &mut rng);
        total += s;
        iterations = iterations.max(it);
        let min_x = pos.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let min_y = pos.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let mut max_x = offset;
        for (&u, p) in comp.iter().zip(&pos) {
            let x = p[0] - min_x + offset;
            max_x = max_x.max(x);
            points[u] = LayoutPoint { x, y: p[1] - min_y, z: knumbers.get(u).average };
        }
        offset = max_x + COMPONENT_GAP;
    }
    LayoutTable { points, stress: total, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::KComponents;
    use crate::generators::{complete, path};
    use crate::hierarchy::k_number_map;

    fn dist(t: &LayoutTable, a: usize, b: usize) -> f64 {
        (t.points[a].x - t.points[b].x).hypot(t.points[a].y - t.points[b].y)
    }

    fn layout(g: &Graph) -> LayoutTable {
        layout_scatter(g, &k_number_map(g, &KComponents::default()), 5)
    }

    #[test]
    fn single_edge_has_unit_length() {
        let t = layout(&path(2));
        assert!((dist(&t, 0, 1) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn triangle_is_equilateral() {
        let t = layout(&complete(3));
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            assert!((dist(&t, a, b) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn path_straightens() {
        let t = layout(&path(3));
        let ratio = dist(&t, 0, 2) / dist(&t, 0, 1);
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn components_do_not_overlap_and_z_is_copied() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]);
        let m = k_number_map(&g, &KComponents::default());
        let t = layout_scatter(&g, &m, 1);
        let left = (0..3).map(|u| t.points[u].x).fold(f64::MIN, f64::max);
        assert!(t.points[3].x > left && t.points[4].x > left);
        for u in 0..5 {
            assert_eq!(t.points[u].z, m.get(u).average);
        }
        assert_eq!(layout_scatter(&g, &m, 1), t);
    }
}
