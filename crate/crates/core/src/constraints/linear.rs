use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number used for valuations and witnesses.
pub type Rational = BigRational;

/// Builds a rational from an integer numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Clock,
    Parameter,
}

/// A clock or parameter, identified by its ordinal within its kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Variable {
    pub kind: VarKind,
    pub index: usize,
}

impl Variable {
    pub fn clock(index: usize) -> Self {
        Variable {
            kind: VarKind::Clock,
            index,
        }
    }

    pub fn param(index: usize) -> Self {
        Variable {
            kind: VarKind::Parameter,
            index,
        }
    }

    pub fn is_clock(&self) -> bool {
        self.kind == VarKind::Clock
    }
}

/// Variable declaration shared by every constraint of one model: clocks
/// occupy dense positions `0..clocks`, parameters follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    pub clocks: usize,
    pub params: usize,
}

impl Context {
    pub fn new(clocks: usize, params: usize) -> Self {
        Context { clocks, params }
    }

    pub fn dim(&self) -> usize {
        self.clocks + self.params
    }

    pub fn position(&self, v: Variable) -> usize {
        match v.kind {
            VarKind::Clock => {
                assert!(v.index < self.clocks, "clock index out of context");
                v.index
            }
            VarKind::Parameter => {
                assert!(v.index < self.params, "parameter index out of context");
                self.clocks + v.index
            }
        }
    }

    pub fn variable(&self, position: usize) -> Variable {
        if position < self.clocks {
            Variable::clock(position)
        } else {
            Variable::param(position - self.clocks)
        }
    }

    pub fn contains(&self, v: Variable) -> bool {
        match v.kind {
            VarKind::Clock => v.index < self.clocks,
            VarKind::Parameter => v.index < self.params,
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        (0..self.dim()).map(|i| self.variable(i))
    }

    pub fn clock_vars(&self) -> impl Iterator<Item = Variable> {
        (0..self.clocks).map(Variable::clock)
    }

    pub fn param_vars(&self) -> impl Iterator<Item = Variable> {
        (0..self.params).map(Variable::param)
    }

    /// The parameter-only context with the same parameters.
    pub fn params_only(&self) -> Context {
        Context::new(0, self.params)
    }
}

/// Integer-coefficient affine expression; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearTerm {
    coeffs: BTreeMap<Variable, BigInt>,
    constant: BigInt,
}

impl LinearTerm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        LinearTerm {
            coeffs: BTreeMap::new(),
            constant: c.into(),
        }
    }

    pub fn var(v: Variable) -> Self {
        Self::scaled_var(v, 1)
    }

    pub fn scaled_var(v: Variable, c: impl Into<BigInt>) -> Self {
        let mut t = Self::zero();
        t.add_coeff(v, c.into());
        t
    }

    pub fn add_coeff(&mut self, v: Variable, c: BigInt) {
        let entry = self.coeffs.entry(v).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn coeff(&self, v: Variable) -> BigInt {
        self.coeffs.get(&v).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Variable, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn constant_part(&self) -> &BigInt {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Variable> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn scale(&self, k: &BigInt) -> LinearTerm {
        if k.is_zero() {
            return LinearTerm::zero();
        }
        LinearTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn eval(&self, val: &BTreeMap<Variable, Rational>) -> Option<Rational> {
        let mut acc = Rational::from_integer(self.constant.clone());
        for (v, c) in &self.coeffs {
            acc += val.get(v)? * Rational::from_integer(c.clone());
        }
        Some(acc)
    }

    /// Dense coefficient vector under `ctx`.
    pub fn to_dense(&self, ctx: &Context) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); ctx.dim()];
        for (v, c) in &self.coeffs {
            out[ctx.position(*v)] = c.clone();
        }
        out
    }

    pub fn from_dense(ctx: &Context, coeffs: &[BigInt], constant: &BigInt) -> Self {
        let mut t = LinearTerm::constant(constant.clone());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                t.coeffs.insert(ctx.variable(i), c.clone());
            }
        }
        t
    }
}

impl Add for LinearTerm {
    type Output = LinearTerm;
    fn add(mut self, rhs: LinearTerm) -> LinearTerm {
        for (v, c) in rhs.coeffs {
            self.add_coeff(v, c);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Neg for LinearTerm {
    type Output = LinearTerm;
    fn neg(self) -> LinearTerm {
        self.scale(&BigInt::from(-1))
    }
}

impl Sub for LinearTerm {
    type Output = LinearTerm;
    fn sub(self, rhs: LinearTerm) -> LinearTerm {
        self + (-rhs)
    }
}

impl Mul<i64> for LinearTerm {
    type Output = LinearTerm;
    fn mul(self, rhs: i64) -> LinearTerm {
        self.scale(&BigInt::from(rhs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }

    fn holds(&self, ord: Ordering) -> bool {
        match self {
            Relation::Lt => ord == Ordering::Less,
            Relation::Le => ord != Ordering::Greater,
            Relation::Eq => ord == Ordering::Equal,
        }
    }
}

/// Comparison operators accepted from user input; `>`/`>=` are normalized
/// away by negating the term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CompOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CompOp::Lt => "<",
            CompOp::Le => "<=",
            CompOp::Eq => "=",
            CompOp::Ge => ">=",
            CompOp::Gt => ">",
        }
    }
}

/// `term ⋈ 0` with a dense integer coefficient vector.
///
/// Stored normalized: coefficients and constant share no common factor, and
/// equalities have a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub(crate) coeffs: Vec<BigInt>,
    pub(crate) constant: BigInt,
    pub(crate) rel: Relation,
}

impl Inequality {
    pub fn new(coeffs: Vec<BigInt>, constant: BigInt, rel: Relation) -> Self {
        let mut ineq = Inequality {
            coeffs,
            constant,
            rel,
        };
        ineq.normalize();
        ineq
    }

    /// `lhs op rhs` over `ctx`.
    pub fn compare(ctx: &Context, lhs: &LinearTerm, op: CompOp, rhs: &LinearTerm) -> Self {
        let diff = lhs.clone() - rhs.clone();
        let (term, rel) = match op {
            CompOp::Lt => (diff, Relation::Lt),
            CompOp::Le => (diff, Relation::Le),
            CompOp::Eq => (diff, Relation::Eq),
            CompOp::Ge => (-diff, Relation::Le),
            CompOp::Gt => (-diff, Relation::Lt),
        };
        Inequality::new(term.to_dense(ctx), term.constant_part().clone(), rel)
    }

    /// The unsatisfiable constraint `0 < 0`.
    pub fn falsum(dim: usize) -> Self {
        Inequality {
            coeffs: vec![BigInt::zero(); dim],
            constant: BigInt::zero(),
            rel: Relation::Lt,
        }
    }

    pub fn relation(&self) -> Relation {
        self.rel
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn term(&self, ctx: &Context) -> LinearTerm {
        LinearTerm::from_dense(ctx, &self.coeffs, &self.constant)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// For a variable-free inequality, whether it holds.
    pub fn trivially_true(&self) -> Option<bool> {
        if !self.is_trivial() {
            return None;
        }
        Some(self.rel.holds(self.constant.cmp(&BigInt::zero())))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        assert_eq!(point.len(), self.coeffs.len(), "point dimension mismatch");
        let mut acc = Rational::from_integer(self.constant.clone());
        for (c, x) in self.coeffs.iter().zip(point) {
            if !c.is_zero() {
                acc += x * Rational::from_integer(c.clone());
            }
        }
        self.rel.holds(acc.cmp(&Rational::zero()))
    }

    /// Disjuncts of the negation (two for an equality).
    pub fn negate(&self) -> Vec<Inequality> {
        let neg_coeffs: Vec<BigInt> = self.coeffs.iter().map(|c| -c).collect();
        let neg_const = -&self.constant;
        match self.rel {
            Relation::Le => vec![Inequality::new(neg_coeffs, neg_const, Relation::Lt)],
            Relation::Lt => vec![Inequality::new(neg_coeffs, neg_const, Relation::Le)],
            Relation::Eq => vec![
                Inequality::new(self.coeffs.clone(), self.constant.clone(), Relation::Lt),
                Inequality::new(neg_coeffs, neg_const, Relation::Lt),
            ],
        }
    }

    pub(crate) fn normalize(&mut self) {
        let mut g = self.constant.abs();
        for c in &self.coeffs {
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if g.is_zero() {
            return;
        }
        if !g.is_one() {
            for c in &mut self.coeffs {
                *c = &*c / &g;
            }
            self.constant = &self.constant / &g;
        }
        if self.rel == Relation::Eq {
            let lead = self.coeffs.iter().find(|c| !c.is_zero());
            let flip = match lead {
                Some(c) => c.is_negative(),
                None => self.constant.is_negative(),
            };
            if flip {
                for c in &mut self.coeffs {
                    *c = -&*c;
                }
                self.constant = -&self.constant;
            }
        }
    }

    /// Canonical ordering key: support, then coefficients, relation, constant.
    pub(crate) fn order_key(&self) -> (Vec<usize>, &[BigInt], Relation, &BigInt) {
        (
            self.support().collect(),
            &self.coeffs,
            self.rel,
            &self.constant,
        )
    }

    pub(crate) fn canonical_cmp(&self, other: &Inequality) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

/// Builds an integer inequality from rational coefficients by clearing
/// denominators (a positive scaling).
pub(crate) fn from_rational_row(
    coeffs: &[Rational],
    constant: &Rational,
    rel: Relation,
) -> Inequality {
    let mut l = constant.denom().clone();
    for c in coeffs {
        l = l.lcm(c.denom());
    }
    let scale = Rational::from_integer(l);
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &scale).to_integer()).collect();
    let k = (constant * &scale).to_integer();
    Inequality::new(ints, k, rel)
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(2, 2)
    }

    #[test]
    fn normalization_divides_common_factor() {
        let i = Inequality::new(
            vec![
                BigInt::from(2),
                BigInt::from(0),
                BigInt::from(-4),
                BigInt::from(0),
            ],
            BigInt::from(6),
            Relation::Le,
        );
        assert_eq!(
            i.coeffs,
            vec![
                BigInt::from(1),
                BigInt::zero(),
                BigInt::from(-2),
                BigInt::zero()
            ]
        );
        assert_eq!(i.constant, BigInt::from(3));
    }

    #[test]
    fn equalities_get_positive_lead() {
        let i = Inequality::new(
            vec![
                BigInt::from(-1),
                BigInt::from(1),
                BigInt::zero(),
                BigInt::zero(),
            ],
            BigInt::from(1),
            Relation::Eq,
        );
        assert_eq!(i.coeffs[0], BigInt::from(1));
        assert_eq!(i.constant, BigInt::from(-1));
    }

    #[test]
    fn compare_normalizes_ge_and_gt() {
        let c = ctx();
        let x = LinearTerm::var(Variable::clock(0));
        let p = LinearTerm::var(Variable::param(0));
        let ge = Inequality::compare(&c, &x, CompOp::Ge, &p);
        assert_eq!(ge.rel, Relation::Le);
        assert_eq!(ge.coeffs[0], BigInt::from(-1));
        assert_eq!(ge.coeffs[2], BigInt::from(1));
        let gt = Inequality::compare(&c, &x, CompOp::Gt, &LinearTerm::constant(3));
        assert_eq!(gt.rel, Relation::Lt);
        assert!(gt.holds_at(&[int(4), int(0), int(0), int(0)]));
        assert!(!gt.holds_at(&[int(3), int(0), int(0), int(0)]));
    }

    #[test]
    fn trivial_truth() {
        assert_eq!(Inequality::falsum(2).trivially_true(), Some(false));
        let t = Inequality::new(vec![BigInt::zero(); 2], BigInt::from(-5), Relation::Lt);
        assert_eq!(t.trivially_true(), Some(true));
        let e = Inequality::new(vec![BigInt::zero(); 2], BigInt::from(3), Relation::Eq);
        assert_eq!(e.trivially_true(), Some(false));
    }

    #[test]
    fn term_arithmetic_drops_zeros() {
        let x = LinearTerm::var(Variable::clock(0));
        let t = x.clone() - x;
        assert!(t.is_constant());
        assert!(t.constant_part().is_zero());
    }
}
