//! Exact rational linear programming: two-phase tableau simplex with Bland's
//! rule, over non-negative variables.

use num::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// `coeffs · x  cmp  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, cmp: Cmp, rhs: Rational) -> Self {
        Constraint { coeffs, cmp, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    obj: Vec<Rational>,
    obj_rhs: Rational,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (x, p) in self.obj.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.obj_rhs -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over the allowed columns. Returns false if unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        loop {
            let Some(c) = (0..self.obj.len()).find(|&j| allowed[j] && self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn set_objective(&mut self, c: &[Rational]) {
        // reduced costs d_j = c_B B⁻¹ A_j − c_j
        self.obj = c.iter().map(|x| -x.clone()).collect();
        self.obj_rhs = Rational::zero();
        for i in 0..self.rows.len() {
            let cb = &c[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in self.obj.iter_mut().zip(&self.rows[i]) {
                *o += cb * a;
            }
            self.obj_rhs += cb * &self.rhs[i];
        }
    }
}

/// Maximizes `c · x` subject to the constraints and `x ≥ 0`.
pub fn maximize(c: &[Rational], constraints: &[Constraint]) -> LpOutcome {
    let n = c.len();
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|k| k.cmp != Cmp::Eq).count();
    let art_start = n + slack_count;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = n;
    let mut art_count = 0;
    let mut art_of_row = Vec::with_capacity(m);
    for k in constraints {
        assert_eq!(k.coeffs.len(), n, "constraint width differs from objective");
        let mut row: Vec<Rational> = k.coeffs.clone();
        row.resize(art_start, Rational::zero());
        let mut b = k.rhs.clone();
        let mut cmp = k.cmp;
        let slack = if cmp != Cmp::Eq {
            let s = next_slack;
            next_slack += 1;
            row[s] = if cmp == Cmp::Le { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
            Some(s)
        } else {
            None
        };
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            b = -b;
            cmp = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
        if cmp == Cmp::Le {
            basis.push(slack.unwrap());
            art_of_row.push(None);
        } else {
            basis.push(art_start + art_count);
            art_of_row.push(Some(art_count));
            art_count += 1;
        }
        rows.push(row);
        rhs.push(b);
    }
    let total = art_start + art_count;
    for (row, a) in rows.iter_mut().zip(&art_of_row) {
        row.resize(total, Rational::zero());
        if let Some(a) = a {
            row[art_start + a] = Rational::from_integer(1.into());
        }
    }
    let mut t = Tableau { rows, rhs, basis, obj: Vec::new(), obj_rhs: Rational::zero() };

    if art_count > 0 {
        let mut phase1 = vec![Rational::zero(); total];
        for x in phase1.iter_mut().skip(art_start) {
            *x = Rational::from_integer((-1).into());
        }
        t.set_objective(&phase1);
        t.optimize(&vec![true; total]);
        if t.obj_rhs.is_negative() {
            return LpOutcome::Infeasible;
        }
        // drive remaining artificial variables out of the basis
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => t.pivot(r, j),
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
    let mut cost = c.to_vec();
    cost.resize(total, Rational::zero());
    t.set_objective(&cost);
    let allowed: Vec<bool> = (0..total).map(|j| j < art_start).collect();
    if !t.optimize(&allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].clone();
        }
    }
    LpOutcome::Optimal { x, value: t.obj_rhs }
}
