//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are `minimize c·x` subject to `A x (<= | =) b`, `x >= 0`.

use num_traits::{One, Signed, Zero};

use crate::algebra::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub rows: Vec<Vec<Rat>>,
    pub kinds: Vec<RowKind>,
    pub rhs: Vec<Rat>,
    pub cost: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { cost: vec![Rat::zero(); num_vars], ..Default::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn push(&mut self, row: Vec<Rat>, kind: RowKind, rhs: Rat) {
        debug_assert_eq!(row.len(), self.num_vars());
        self.rows.push(row);
        self.kinds.push(kind);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> LpResult {
        Tableau::build(self).run(&self.cost)
    }
}

struct Tableau {
    /// m rows of `ncols` coefficients followed by the right-hand side.
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    n: usize,
    ncols: usize,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let slacks: Vec<usize> = (0..m).filter(|&i| lp.kinds[i] == RowKind::Le).collect();
        let first_artificial = n + slacks.len();
        let needs_art: Vec<bool> =
            (0..m).map(|i| lp.kinds[i] == RowKind::Eq || lp.rhs[i].is_negative()).collect();
        let nart = needs_art.iter().filter(|&&b| b).count();
        let ncols = first_artificial + nart;
        let mut t = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_slack = n;
        let mut next_art = first_artificial;
        for i in 0..m {
            let mut row = vec![Rat::zero(); ncols + 1];
            let flip = lp.rhs[i].is_negative();
            let sign = if flip { -Rat::one() } else { Rat::one() };
            for (j, a) in lp.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    row[j] = a * &sign;
                }
            }
            row[ncols] = &lp.rhs[i] * &sign;
            let mut basic = None;
            if lp.kinds[i] == RowKind::Le {
                row[next_slack] = sign.clone();
                if !flip {
                    basic = Some(next_slack);
                }
                next_slack += 1;
            }
            if needs_art[i] {
                row[next_art] = Rat::one();
                basic = Some(next_art);
                next_art += 1;
            }
            t.push(row);
            basis.push(basic.expect("every row has a basic column"));
        }
        Tableau { t, basis, n, ncols, first_artificial }
    }

    fn rhs(&self, i: usize) -> &Rat {
        &self.t[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = self.t[r].clone();
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.t[i][j] -= d;
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of all columns for the cost vector `c` (length ncols).
    fn reduced(&self, c: &[Rat]) -> Vec<Rat> {
        let mut d = c.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if c[b].is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.t[i][j].is_zero() {
                    d[j] -= &c[b] * &self.t[i][j];
                }
            }
        }
        d
    }

    /// Minimize `c` over columns `< limit`. Returns false when unbounded.
    fn optimize(&mut self, c: &[Rat], limit: usize) -> bool {
        loop {
            let d = self.reduced(c);
            let Some(enter) = (0..limit).find(|&j| d[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(Rat, usize, usize)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][enter];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn run(mut self, cost: &[Rat]) -> LpResult {
        if self.first_artificial < self.ncols {
            let mut c1 = vec![Rat::zero(); self.ncols];
            for x in &mut c1[self.first_artificial..] {
                *x = Rat::one();
            }
            self.optimize(&c1, self.ncols);
            let infeasible = self
                .basis
                .iter()
                .enumerate()
                .any(|(i, &b)| b >= self.first_artificial && !self.rhs(i).is_zero());
            if infeasible {
                return LpResult::Infeasible;
            }
            // drive remaining (zero-valued) artificials out of the basis
            let mut i = 0;
            while i < self.t.len() {
                if self.basis[i] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.t[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.t.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut c2 = vec![Rat::zero(); self.ncols];
        c2[..self.n].clone_from_slice(cost);
        if !self.optimize(&c2, self.first_artificial) {
            return LpResult::Unbounded;
        }
        let mut x = vec![Rat::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs(i).clone();
            }
        }
        let value = x.iter().zip(cost).map(|(a, b)| a * b).sum();
        LpResult::Optimal { x, value }
    }
}

/// A Farkas certificate for `A x <= b, x >= 0`: `y >= 0` with `Aᵀy >= 0` and
/// `bᵀy = -1`, found by solving that system as its own LP (minimizing the
/// total multiplier mass).
pub fn farkas(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut lp = LinearProgram::new(m);
    for j in 0..n {
        lp.push((0..m).map(|i| -rows[i][j].clone()).collect(), RowKind::Le, Rat::zero());
    }
    lp.push(rhs.to_vec(), RowKind::Eq, -Rat::one());
    lp.cost = vec![Rat::one(); m];
    match lp.solve() {
        LpResult::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Check a Farkas certificate directly. Returns the guaranteed violation
/// `max_i (a_i x - b_i) >= -bᵀy / Σy` valid for every `x >= 0`, or `None`
/// when the vector is not a certificate.
pub fn verify_farkas(rows: &[Vec<Rat>], rhs: &[Rat], y: &[Rat]) -> Option<Rat> {
    if y.len() != rows.len() || y.iter().any(Signed::is_negative) {
        return None;
    }
    let n = rows.first().map_or(0, Vec::len);
    for j in 0..n {
        let s: Rat = rows.iter().zip(y).map(|(r, yi)| &r[j] * yi).sum();
        if s.is_negative() {
            return None;
        }
    }
    let by: Rat = rhs.iter().zip(y).map(|(b, yi)| b * yi).sum();
    let total: Rat = y.iter().sum();
    if !by.is_negative() || total.is_zero() {
        return None;
    }
    Some(-by / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn textbook_optimum() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.cost = vec![r(-3), r(-5)];
        lp.push(vec![r(1), r(0)], RowKind::Le, r(4));
        lp.push(vec![r(0), r(2)], RowKind::Le, r(12));
        lp.push(vec![r(3), r(2)], RowKind::Le, r(18));
        assert_eq!(lp.solve(), LpResult::Optimal { x: vec![r(2), r(6)], value: r(-36) });
    }

    #[test]
    fn equalities_and_negative_rhs() {
        // x + y = 1, -x <= -1/3 (x >= 1/3), minimize y
        let mut lp = LinearProgram::new(2);
        lp.cost = vec![r(0), r(1)];
        lp.push(vec![r(1), r(1)], RowKind::Eq, r(1));
        lp.push(vec![r(-1), r(0)], RowKind::Le, rat(-1, 3));
        lp.push(vec![r(1), r(0)], RowKind::Le, r(5));
        assert_eq!(lp.solve(), LpResult::Optimal { x: vec![r(1), r(0)], value: r(0) });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![r(1)], RowKind::Le, r(1));
        lp.push(vec![r(-1)], RowKind::Le, r(-2));
        assert_eq!(lp.solve(), LpResult::Infeasible);
        let y = farkas(&lp.rows, &lp.rhs).unwrap();
        assert_eq!(verify_farkas(&lp.rows, &lp.rhs, &y), Some(rat(1, 2)));

        let mut lp = LinearProgram::new(2);
        lp.cost = vec![r(-1), r(0)];
        lp.push(vec![r(1), r(-1)], RowKind::Le, r(1));
        assert_eq!(lp.solve(), LpResult::Unbounded);
    }

    #[test]
    fn degenerate_redundant_equalities() {
        let mut lp = LinearProgram::new(3);
        lp.cost = vec![r(1), r(1), r(1)];
        lp.push(vec![r(1), r(1), r(0)], RowKind::Eq, r(2));
        lp.push(vec![r(2), r(2), r(0)], RowKind::Eq, r(4));
        lp.push(vec![r(0), r(1), r(1)], RowKind::Eq, r(1));
        match lp.solve() {
            LpResult::Optimal { value, .. } => assert_eq!(value, r(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn farkas_rejects_non_certificates() {
        let rows = vec![vec![r(1)], vec![r(-1)]];
        let rhs = vec![r(1), r(-2)];
        assert_eq!(verify_farkas(&rows, &rhs, &[r(1), r(0)]), None);
        assert_eq!(verify_farkas(&rows, &rhs, &[r(-1), r(1)]), None);
        assert!(farkas(&rows, &[r(2), r(-1)]).is_none());
    }
}
