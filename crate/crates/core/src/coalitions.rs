//! Lazy enumeration of candidate deviating coalitions.

use crate::net::DirectedNetwork;

/// Which agent sets count as coalitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalitionMode {
    /// Cliques of the symmetrized graph (`g_ij + g_ji >= 1` for every pair).
    Adjacent,
    /// Every subset.
    Any,
}

/// Yields coalitions with sizes in `min_size..=max_size`, grouped by size and
/// lexicographic within a size. Each set is produced exactly once.
pub struct Coalitions<'a> {
    net: &'a DirectedNetwork,
    mode: CoalitionMode,
    size: usize,
    max_size: usize,
    // Current partial clique and, per depth, the candidates still to try.
    chosen: Vec<usize>,
    frames: Vec<(Vec<usize>, usize)>,
}

pub fn adjacent_coalitions(
    net: &DirectedNetwork,
    min_size: usize,
    max_size: usize,
) -> Coalitions<'_> {
    coalitions(net, CoalitionMode::Adjacent, min_size, max_size)
}

pub fn coalitions(
    net: &DirectedNetwork,
    mode: CoalitionMode,
    min_size: usize,
    max_size: usize,
) -> Coalitions<'_> {
    let min_size = min_size.max(1);
    let max_size = max_size.min(net.n());
    let mut it = Coalitions {
        net,
        mode,
        size: min_size,
        max_size,
        chosen: Vec::new(),
        frames: Vec::new(),
    };
    if min_size <= max_size {
        it.frames.push(((0..net.n()).collect(), 0));
    }
    it
}

fn compatible(net: &DirectedNetwork, mode: CoalitionMode, u: usize, v: usize) -> bool {
    match mode {
        CoalitionMode::Adjacent => net.adjacent(u, v),
        CoalitionMode::Any => true,
    }
}

impl Iterator for Coalitions<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let (net, mode) = (self.net, self.mode);
        loop {
            if self.size > self.max_size {
                return None;
            }
            let Some((cands, pos)) = self.frames.last_mut() else {
                self.size += 1;
                if self.size <= self.max_size {
                    self.frames.push(((0..self.net.n()).collect(), 0));
                }
                continue;
            };
            if *pos >= cands.len() {
                self.frames.pop();
                self.chosen.pop();
                continue;
            }
            let v = cands[*pos];
            *pos += 1;
            let need = self.size - self.chosen.len() - 1;
            // Not enough candidates left after v to complete a set of this size.
            if cands.len() - *pos < need {
                self.frames.pop();
                self.chosen.pop();
                continue;
            }
            if need == 0 {
                let mut out = self.chosen.clone();
                out.push(v);
                return Some(out);
            }
            let next: Vec<usize> = cands[*pos..]
                .iter()
                .copied()
                .filter(|&u| compatible(net, mode, u, v))
                .collect();
            if next.len() >= need {
                self.chosen.push(v);
                self.frames.push((next, 0));
            }
        }
    }
}
