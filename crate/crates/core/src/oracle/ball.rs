use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{domain, HcError, Result};

/// Number of children of the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootDegree {
    /// `k + 1` children: the ball `V_n` of the full Cayley tree.
    Full,
    /// `k` children: the half-tree the boundary-law recursion runs on.
    Half,
}

/// Largest ball that will be materialised.
pub const MAX_BALL_VERTICES: usize = 1 << 24;

/// A rooted ball of the Cayley tree of order `k`, depth `n`.
///
/// Vertices are numbered level by level (breadth first), so every parent
/// precedes its children and the children of a vertex form a contiguous
/// index range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteBall {
    k: u32,
    depth: u32,
    root: RootDegree,
    level_start: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Range<usize>>,
}

impl FiniteBall {
    pub fn new(k: u32, depth: u32, root: RootDegree) -> Result<Self> {
        if k < 1 {
            return domain(format!("tree order must be >= 1, got {k}"));
        }
        let total = Self::vertex_count_for(k, depth, root)
            .filter(|&n| n <= MAX_BALL_VERTICES)
            .ok_or(HcError::SizeLimit {
                vertices: usize::MAX,
                cap: MAX_BALL_VERTICES,
            })?;

        let mut level_start = Vec::with_capacity(depth as usize + 2);
        let mut width = 1usize;
        let mut start = 0usize;
        for level in 0..=depth {
            level_start.push(start);
            start += width;
            width *= if level == 0 {
                root_children(k, root)
            } else {
                k as usize
            };
        }
        level_start.push(start);
        debug_assert_eq!(start, total);

        let mut parent = vec![None; total];
        let mut children = vec![0..0; total];
        for level in 0..depth as usize {
            let fan = if level == 0 {
                root_children(k, root)
            } else {
                k as usize
            };
            let (lo, hi) = (level_start[level], level_start[level + 1]);
            for (j, v) in (lo..hi).enumerate() {
                let first = level_start[level + 1] + j * fan;
                children[v] = first..first + fan;
                parent[first..first + fan].fill(Some(v));
            }
        }
        Ok(Self {
            k,
            depth,
            root,
            level_start,
            parent,
            children,
        })
    }

    /// `|V_n|` without building the ball; `None` on overflow.
    pub fn vertex_count_for(k: u32, depth: u32, root: RootDegree) -> Option<usize> {
        let mut total = 1usize;
        let mut width = 1usize;
        for level in 0..depth {
            let fan = if level == 0 {
                root_children(k, root)
            } else {
                k as usize
            };
            width = width.checked_mul(fan)?;
            total = total.checked_add(width)?;
        }
        Some(total)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn root_degree(&self) -> RootDegree {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// Vertices of level `W_level`.
    pub fn level(&self, level: u32) -> Range<usize> {
        let l = level as usize;
        self.level_start[l]..self.level_start[l + 1]
    }

    /// Vertices of `V_level`, i.e. levels `0..=level`.
    pub fn up_to(&self, level: u32) -> Range<usize> {
        0..self.level_start[level as usize + 1]
    }

    pub fn leaves(&self) -> Range<usize> {
        self.level(self.depth)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> Range<usize> {
        self.children[v].clone()
    }

    pub fn level_of(&self, v: usize) -> u32 {
        (self.level_start.partition_point(|&s| s <= v) - 1) as u32
    }
}

fn root_children(k: u32, root: RootDegree) -> usize {
    match root {
        RootDegree::Full => k as usize + 1,
        RootDegree::Half => k as usize,
    }
}

/// A 0/1 spin per vertex of a ball.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub spins: Vec<u8>,
}

impl Configuration {
    /// No two adjacent vertices are both occupied.
    pub fn is_admissible(&self, ball: &FiniteBall) -> bool {
        self.spins
            .iter()
            .enumerate()
            .all(|(v, &s)| s == 0 || ball.parent(v).is_none_or(|p| self.spins[p] == 0))
    }

    pub fn occupied(&self) -> usize {
        self.spins.iter().filter(|&&s| s == 1).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_counts() {
        for k in 1..=5u32 {
            for n in 0..=4u32 {
                for (root, d) in [(RootDegree::Full, k + 1), (RootDegree::Half, k)] {
                    let ball = FiniteBall::new(k, n, root).unwrap();
                    let want = if n == 0 {
                        1
                    } else if k == 1 {
                        1 + d * n
                    } else {
                        1 + d * (k.pow(n) - 1) / (k - 1)
                    };
                    assert_eq!(ball.vertex_count(), want as usize);
                    let levels: usize = (0..=n).map(|l| ball.level(l).len()).sum();
                    assert_eq!(levels, ball.vertex_count());
                }
            }
        }
    }

    #[test]
    fn parent_child_links() {
        let ball = FiniteBall::new(2, 3, RootDegree::Full).unwrap();
        assert_eq!(ball.children(0), 1..4);
        assert_eq!(ball.level(1), 1..4);
        assert_eq!(ball.level(2), 4..10);
        for v in 1..ball.vertex_count() {
            let p = ball.parent(v).unwrap();
            assert!(ball.children(p).contains(&v));
            assert_eq!(ball.level_of(v), ball.level_of(p) + 1);
        }
        assert!(ball.leaves().all(|v| ball.children(v).is_empty()));
    }

    #[test]
    fn admissibility() {
        let ball = FiniteBall::new(2, 1, RootDegree::Half).unwrap();
        assert!(Configuration {
            spins: vec![0, 1, 1]
        }
        .is_admissible(&ball));
        assert!(!Configuration {
            spins: vec![1, 1, 0]
        }
        .is_admissible(&ball));
    }
}
