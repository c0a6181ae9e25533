//! Finite posets and the canonical basis order of their incidence algebras.
//!
//! The element order fixed at construction determines every downstream
//! coordinate system: basis index `i < n` is the diagonal element `e_i`, and
//! index `n + k` is the `k`-th strict pair in lexicographic order of
//! `(index of x, index of y)`.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Upper bound on `|X|` for algebra construction.
pub const MAX_ELEMENTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("cycle detected: {0} and {1} are mutually related (antisymmetry violated)")]
    Cycle(String, String),
    #[error("poset has {0} elements; at most {MAX_ELEMENTS} are supported")]
    TooLarge(usize),
    #[error("poset must have at least one element")]
    Empty,
    #[error("element label `{0}` must be non-empty and free of whitespace, `<`, `,`, `[`, `]`, `{{`, `}}`")]
    BadLabel(String),
    #[error("unknown built-in poset `{0}` (expected chain:n, antichain:n, v, diamond)")]
    UnknownBuiltin(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    leq: Vec<bool>,
    strict: Vec<(usize, usize)>,
    // n * n lookup: basis index of (x, y) if x <= y
    index: Vec<Option<usize>>,
}

fn valid_label(s: &str) -> bool {
    !s.is_empty()
        && !s
            .chars()
            .any(|c| c.is_whitespace() || "<,[]{}".contains(c))
}

impl Poset {
    /// Builds the reflexive-transitive closure of `relations` (pairs of
    /// element indices meaning `x <= y`) and validates antisymmetry.
    pub fn new(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self, PosetError> {
        let n = labels.len();
        if n == 0 {
            return Err(PosetError::Empty);
        }
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooLarge(n));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !valid_label(l) {
                return Err(PosetError::BadLabel(l.clone()));
            }
            if !seen.insert(l.as_str()) {
                return Err(PosetError::DuplicateLabel(l.clone()));
            }
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(x, y) in relations {
            assert!(x < n && y < n, "relation index out of range");
            leq[x * n + y] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(PosetError::Cycle(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(Self::from_closed(labels, leq))
    }

    /// Builds from labels and label pairs `x < y` (any generating relation).
    pub fn from_labels<S: AsRef<str>>(
        labels: &[S],
        relations: &[(S, S)],
    ) -> Result<Self, PosetError> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let find = |s: &str| {
            labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| PosetError::UnknownLabel(s.to_string()))
        };
        let rel = relations
            .iter()
            .map(|(a, b)| Ok((find(a.as_ref())?, find(b.as_ref())?)))
            .collect::<Result<Vec<_>, PosetError>>()?;
        Poset::new(labels, &rel)
    }

    fn from_closed(labels: Vec<String>, leq: Vec<bool>) -> Self {
        let n = labels.len();
        let mut strict = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && leq[x * n + y] {
                    strict.push((x, y));
                }
            }
        }
        let mut index = vec![None; n * n];
        for x in 0..n {
            index[x * n + x] = Some(x);
        }
        for (k, &(x, y)) in strict.iter().enumerate() {
            index[x * n + y] = Some(n + k);
        }
        Poset {
            labels,
            leq,
            strict,
            index,
        }
    }

    /// `chain:n`, `antichain:n`, `v`, `diamond`.
    pub fn builtin(name: &str) -> Result<Self, PosetError> {
        let unknown = || PosetError::UnknownBuiltin(name.to_string());
        let numbered = |n: usize| (1..=n).map(|i| i.to_string()).collect::<Vec<_>>();
        if let Some(n) = name.strip_prefix("chain:") {
            let n: usize = n.parse().map_err(|_| unknown())?;
            let rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            return Poset::new(numbered(n), &rel);
        }
        if let Some(n) = name.strip_prefix("antichain:") {
            let n: usize = n.parse().map_err(|_| unknown())?;
            return Poset::new(numbered(n), &[]);
        }
        match name {
            "v" => Poset::from_labels(&["a", "b", "c"], &[("a", "c"), ("b", "c")]),
            "diamond" => Poset::from_labels(
                &["a", "b", "c", "d"],
                &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
            ),
            _ => Err(unknown()),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.len() + y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// Strict pairs `x < y` in canonical (lexicographic) order.
    pub fn strict_pairs(&self) -> &[(usize, usize)] {
        &self.strict
    }

    /// Dimension of the incidence algebra: `|X| + |strict pairs|`.
    pub fn basis_len(&self) -> usize {
        self.len() + self.strict.len()
    }

    /// Basis index of `e_{xy}` (or `e_x` when `x == y`), if `x <= y`.
    pub fn basis_index(&self, x: usize, y: usize) -> Option<usize> {
        self.index[x * self.len() + y]
    }

    /// The pair `(x, y)` at basis index `i`.
    pub fn basis_pair(&self, i: usize) -> (usize, usize) {
        let n = self.len();
        if i < n {
            (i, i)
        } else {
            self.strict[i - n]
        }
    }

    pub fn is_connected(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for (y, s) in seen.iter_mut().enumerate() {
                if !*s && (self.leq(x, y) || self.leq(y, x)) {
                    *s = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Same elements, reversed order.
    pub fn dual(&self) -> Poset {
        let n = self.len();
        let mut leq = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                leq[x * n + y] = self.leq(y, x);
            }
        }
        Poset::from_closed(self.labels.clone(), leq)
    }

    /// Maximum number of elements in a chain.
    pub fn longest_chain(&self) -> usize {
        let n = self.len();
        // down-set sizes give a linear extension
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&y| (0..n).filter(|&x| self.leq(x, y)).count());
        let mut best = vec![1usize; n];
        for (i, &y) in order.iter().enumerate() {
            for &x in &order[..i] {
                if self.lt(x, y) {
                    best[y] = best[y].max(best[x] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Covering relations `x < y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.strict
            .iter()
            .copied()
            .filter(|&(x, y)| !(0..self.len()).any(|z| self.lt(x, z) && self.lt(z, y)))
            .collect()
    }
}

impl fmt::Display for Poset {
    /// The text file format; relations are written as covers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "poset")?;
        writeln!(f, "elements: {}", self.labels.join(" "))?;
        let rel: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(x, y)| format!("{}<{}", self.labels[x], self.labels[y]))
            .collect();
        writeln!(f, "relations: {}", rel.join(" "))
    }
}
