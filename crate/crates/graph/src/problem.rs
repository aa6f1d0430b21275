use std::fmt;
use std::str::FromStr;

use crate::{GraphError, Result, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Problem {
    Bfs,
    Sssp,
    Wcc,
    Spmv,
    PageRank,
}

impl Problem {
    pub const ALL: [Problem; 5] = [
        Problem::Bfs,
        Problem::Sssp,
        Problem::Wcc,
        Problem::Spmv,
        Problem::PageRank,
    ];

    pub fn needs_root(self) -> bool {
        matches!(self, Problem::Bfs | Problem::Sssp)
    }

    /// SpMV and PageRank run a fixed number of sweeps instead of iterating
    /// to a fixpoint.
    pub fn is_stationary(self) -> bool {
        matches!(self, Problem::Spmv | Problem::PageRank)
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Bfs => "bfs",
            Problem::Sssp => "sssp",
            Problem::Wcc => "wcc",
            Problem::Spmv => "spmv",
            Problem::PageRank => "pr",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" => Ok(Problem::Bfs),
            "sssp" => Ok(Problem::Sssp),
            "wcc" => Ok(Problem::Wcc),
            "spmv" => Ok(Problem::Spmv),
            "pr" | "pagerank" => Ok(Problem::PageRank),
            other => Err(GraphError::InvalidSpec(format!("unknown problem {other:?}"))),
        }
    }
}

/// Which PageRank recurrence to evaluate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PrFormula {
    /// `(1 - d) / n + d * sum(p(j) / deg(j))`
    #[default]
    Standard,
    /// `(1 - d) / n + sum(p(j) / deg(j))`, without damping on the sum.
    Undamped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub problem: Problem,
    pub root: Option<VertexId>,
    /// Width of one vertex value in memory; also fixes the unreached
    /// sentinel of BFS/SSSP.
    pub value_bits: u8,
    pub damping: f64,
    pub pr_formula: PrFormula,
    /// Sweep count for stationary problems.
    pub max_iterations: u32,
    /// Initial vector entry for SpMV/PageRank; `None` means `1 / n`.
    pub initial: Option<f64>,
}

impl ProblemSpec {
    pub fn new(problem: Problem) -> Self {
        ProblemSpec {
            problem,
            root: None,
            value_bits: 32,
            damping: 0.85,
            pr_formula: PrFormula::Standard,
            max_iterations: 1,
            initial: None,
        }
    }

    pub fn with_root(mut self, root: VertexId) -> Self {
        self.root = Some(root);
        self
    }

    pub fn with_value_bits(mut self, bits: u8) -> Self {
        self.value_bits = bits;
        self
    }

    pub fn with_iterations(mut self, iterations: u32) -> Self {
        self.max_iterations = iterations;
        self
    }

    pub fn value_bytes(&self) -> u32 {
        (self.value_bits as u32).div_ceil(8)
    }

    /// Largest value representable in `value_bits`; marks unreached vertices.
    pub fn unreached(&self) -> u32 {
        if self.value_bits >= 32 {
            u32::MAX
        } else {
            (1u32 << self.value_bits) - 1
        }
    }

    pub fn initial_real(&self, n: usize) -> f64 {
        self.initial.unwrap_or(1.0 / n.max(1) as f64)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let p = self.problem;
        match (p.needs_root(), self.root) {
            (true, None) => return Err(GraphError::InvalidSpec(format!("{p} requires a root vertex"))),
            (false, Some(_)) => return Err(GraphError::InvalidSpec(format!("{p} takes no root vertex"))),
            (true, Some(root)) if root as usize >= n => return Err(GraphError::RootOutOfRange { root, n }),
            _ => {}
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(GraphError::InvalidSpec(format!(
                "damping {} outside (0, 1)",
                self.damping
            )));
        }
        if !matches!(self.value_bits, 8 | 16 | 32 | 64) {
            return Err(GraphError::InvalidSpec(format!(
                "unsupported value width {} bits",
                self.value_bits
            )));
        }
        if p.is_stationary() && self.max_iterations == 0 {
            return Err(GraphError::InvalidSpec("zero iterations".into()));
        }
        Ok(())
    }
}

/// Per-vertex results: integer labels/distances or real-valued vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Discrete(Vec<u32>),
    Real(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Discrete(v) => v.len(),
            Values::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_discrete(&self) -> Option<&[u32]> {
        match self {
            Values::Discrete(v) => Some(v),
            Values::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Values::Real(v) => Some(v),
            Values::Discrete(_) => None,
        }
    }

    /// Exact equality for discrete values, relative tolerance `rel` for
    /// real values (summation order differs between engines).
    pub fn approx_eq(&self, other: &Values, rel: f64) -> bool {
        match (self, other) {
            (Values::Discrete(a), Values::Discrete(b)) => a == b,
            (Values::Real(a), Values::Real(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| {
                        let scale = x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
                        (x - y).abs() <= rel * scale
                    })
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_rules() {
        assert!(ProblemSpec::new(Problem::Bfs).validate(3).is_err());
        assert!(ProblemSpec::new(Problem::Wcc).with_root(0).validate(3).is_err());
        assert!(matches!(
            ProblemSpec::new(Problem::Sssp).with_root(3).validate(3),
            Err(GraphError::RootOutOfRange { root: 3, n: 3 })
        ));
        assert!(ProblemSpec::new(Problem::Sssp).with_root(2).validate(3).is_ok());
    }

    #[test]
    fn damping_must_be_a_fraction() {
        let mut spec = ProblemSpec::new(Problem::PageRank);
        spec.damping = 1.0;
        assert!(spec.validate(4).is_err());
        spec.damping = 0.5;
        assert!(spec.validate(4).is_ok());
    }

    #[test]
    fn sentinels() {
        assert_eq!(ProblemSpec::new(Problem::Bfs).with_value_bits(8).unreached(), 255);
        assert_eq!(ProblemSpec::new(Problem::Bfs).unreached(), u32::MAX);
        assert_eq!(ProblemSpec::new(Problem::Bfs).with_value_bits(8).value_bytes(), 1);
    }

    #[test]
    fn parse_names() {
        for p in Problem::ALL {
            assert_eq!(p.name().parse::<Problem>().unwrap(), p);
        }
        assert!("dfs".parse::<Problem>().is_err());
    }
}
