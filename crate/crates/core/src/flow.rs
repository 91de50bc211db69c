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

//! Residual-graph max-flow used by the exact connectivity routines.

use std::collections::VecDeque;

/// Directed network in compressed adjacency form. Every arc has a paired
/// reverse arc of zero capacity. Flows are undone with [`FlowNetwork::reset`]
/// in time proportional to the arcs touched, so one network serves many
/// source/sink queries.
#[derive(Clone, Debug)]
pub(crate) struct FlowNetwork {
    start: Vec<usize>,
    to: Vec<usize>,
    rev: Vec<usize>,
    cap: Vec<u32>,
    base: Vec<u32>,
    touched: Vec<usize>,
    pred: Vec<usize>,
    mark: Vec<u32>,
    stamp: u32,
    queue: VecDeque<usize>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize, arcs: &[(usize, usize, u32)]) -> Self {
        let mut count = vec![0usize; nodes + 1];
        for &(a, b, _) in arcs {
            count[a + 1] += 1;
            count[b + 1] += 1;
        }
        for i in 1..=nodes {
            count[i] += count[i - 1];
        }
        let start = count.clone();
        let total = 2 * arcs.len();
        let mut next = count;
        let mut to = vec![0; total];
        let mut rev = vec![0; total];
        let mut cap = vec![0; total];
        for &(a, b, c) in arcs {
            let ea = next[a];
            next[a] += 1;
            let eb = next[b];
            next[b] += 1;
            to[ea] = b;
            cap[ea] = c;
            rev[ea] = eb;
            to[eb] = a;
            cap[eb] = 0;
            rev[eb] = ea;
        }
        FlowNetwork {
            start,
            to,
            rev,
            base: cap.clone(),
            cap,
            touched: Vec::new(),
            pred: vec![usize::MAX; nodes],
            mark: vec![0; nodes],
            stamp: 0,
            queue: VecDeque::new(),
        }
    }

    pub(crate) fn node_count(&self) -> usize {
        self.start.len() - 1
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// Shortest augmenting paths from `s` to `t` until no path remains or the
    /// flow reaches `limit`. Returns the flow value.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut flow = 0usize;
        while flow < limit {
            let stamp = self.next_stamp();
            self.mark[s] = stamp;
            self.queue.clear();
            self.queue.push_back(s);
            let mut found = false;
            'bfs: while let Some(x) = self.queue.pop_front() {
                for e in self.start[x]..self.start[x + 1] {
                    let y = self.to[e];
                    if self.cap[e] > 0 && self.mark[y] != stamp {
                        self.mark[y] = stamp;
                        self.pred[y] = e;
                        if y == t {
                            found = true;
                            break 'bfs;
                        }
                        self.queue.push_back(y);
                    }
                }
            }
            if !found {
                break;
            }
            let mut push = (limit - flow).min(u32::MAX as usize) as u32;
            let mut y = t;
            while y != s {
                let e = self.pred[y];
                push = push.min(self.cap[e]);
                y = self.to[self.rev[e]];
            }
            let mut y = t;
            while y != s {
                let e = self.pred[y];
                let r = self.rev[e];
                self.cap[e] -= push;
                self.cap[r] += push;
                self.touched.push(e);
                self.touched.push(r);
                y = self.to[r];
            }
            flow += push as usize;
        }
        flow
    }

    /// Restores every capacity changed since the last reset.
    pub(crate) fn reset(&mut self) {
        for &e in &self.touched {
            self.cap[e] = self.base[e];
        }
        self.touched.clear();
    }

    /// Residual arcs `(from, to)` with positive remaining capacity.
    pub(crate) fn residual_arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count())
            .flat_map(move |x| (self.start[x]..self.start[x + 1]).filter(move |&e| self.cap[e] > 0).map(move |e| (x, self.to[e])))
    }
}
