use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::fm;
use super::linear::{
    from_rational_row, Context, Inequality, Rational, Relation, VarKind, Variable,
};
use super::ConstraintError;

/// Conjunction of linear inequalities over clocks and parameters, every
/// variable implicitly nonnegative.
///
/// Values built by the set operations are canonical: implicit equalities are
/// made explicit and reduced to row-echelon form, the remaining inequalities
/// are reduced modulo the equalities, redundant ones are dropped and the list
/// is sorted. Equal point sets then have equal inequality lists.
/// [`Polyhedron::from_inequalities`] keeps its input atoms verbatim instead.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    ctx: Context,
    atoms: Vec<Inequality>,
    canonical: bool,
    empty: OnceLock<bool>,
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.atoms == other.atoms
    }
}

impl Eq for Polyhedron {}

impl Hash for Polyhedron {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.hash(state);
        self.atoms.hash(state);
    }
}

impl PartialOrd for Polyhedron {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Polyhedron {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.atoms.len().cmp(&other.atoms.len()).then_with(|| {
            for (a, b) in self.atoms.iter().zip(&other.atoms) {
                let o = a.canonical_cmp(b);
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl Polyhedron {
    /// The unconstrained polyhedron (only the implicit nonnegativity).
    pub fn universe(ctx: Context) -> Self {
        Polyhedron {
            ctx,
            atoms: Vec::new(),
            canonical: true,
            empty: OnceLock::from(false),
        }
    }

    pub fn empty(ctx: Context) -> Self {
        Polyhedron {
            ctx,
            atoms: vec![Inequality::falsum(ctx.dim())],
            canonical: true,
            empty: OnceLock::from(true),
        }
    }

    /// Wraps atoms as given; only each atom is normalized, nothing is merged.
    pub fn from_inequalities(
        ctx: Context,
        atoms: Vec<Inequality>,
    ) -> Result<Self, ConstraintError> {
        for a in &atoms {
            if a.dim() != ctx.dim() {
                return Err(ConstraintError::ContextMismatch);
            }
        }
        Ok(Polyhedron {
            ctx,
            atoms,
            canonical: false,
            empty: OnceLock::new(),
        })
    }

    /// Canonical polyhedron of the conjunction of `atoms`.
    pub fn from_atoms_canonical(
        ctx: Context,
        atoms: Vec<Inequality>,
    ) -> Result<Self, ConstraintError> {
        Ok(Self::from_inequalities(ctx, atoms)?.canonicalize())
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.atoms
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn is_universe(&self) -> bool {
        self.atoms.iter().all(|a| a.trivially_true() == Some(true))
    }

    pub fn is_empty(&self) -> bool {
        *self
            .empty
            .get_or_init(|| fm::solve(self.ctx.dim(), &self.atoms).is_none())
    }

    /// A rational point (dense, clocks then parameters) satisfying every
    /// constraint, with all coordinates nonnegative.
    pub fn sample_point(&self) -> Option<Vec<Rational>> {
        let p = fm::solve(self.ctx.dim(), &self.atoms);
        let _ = self.empty.set(p.is_none());
        p
    }

    /// Membership of a dense point.
    pub fn contains_point(&self, point: &[Rational]) -> bool {
        assert_eq!(point.len(), self.ctx.dim(), "point dimension mismatch");
        point.iter().all(|x| !x.is_negative()) && self.atoms.iter().all(|a| a.holds_at(point))
    }

    /// Membership of a valuation given as a map; every context variable must
    /// be assigned.
    pub fn satisfies(&self, val: &BTreeMap<Variable, Rational>) -> Result<bool, ConstraintError> {
        let mut point = Vec::with_capacity(self.ctx.dim());
        for v in self.ctx.variables() {
            match val.get(&v) {
                Some(x) => point.push(x.clone()),
                None => return Err(ConstraintError::MissingVariable(v)),
            }
        }
        Ok(self.contains_point(&point))
    }

    /// Conjunction without canonicalization.
    pub fn conjoin(&self, other: &Polyhedron) -> Polyhedron {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Polyhedron {
            ctx: self.ctx,
            atoms,
            canonical: false,
            empty: OnceLock::new(),
        }
    }

    pub fn with_atom(&self, atom: Inequality) -> Polyhedron {
        assert_eq!(atom.dim(), self.ctx.dim(), "context mismatch");
        let mut atoms = self.atoms.clone();
        atoms.push(atom);
        Polyhedron {
            ctx: self.ctx,
            atoms,
            canonical: false,
            empty: OnceLock::new(),
        }
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        self.conjoin(other).canonicalize()
    }

    /// Existentially quantifies `vars`; they stay in the context, bounded
    /// only by nonnegativity.
    pub fn eliminate(&self, vars: &[Variable]) -> Polyhedron {
        let positions: Vec<usize> = vars.iter().map(|v| self.ctx.position(*v)).collect();
        self.eliminate_positions(&positions)
    }

    fn eliminate_positions(&self, positions: &[usize]) -> Polyhedron {
        if self.is_empty() {
            return Polyhedron::empty(self.ctx);
        }
        let mut positions = positions.to_vec();
        positions.sort_unstable();
        positions.dedup();
        match fm::project(self.ctx.dim(), &self.atoms, &positions) {
            Ok(rows) => Polyhedron {
                ctx: self.ctx,
                atoms: rows,
                canonical: false,
                empty: OnceLock::new(),
            }
            .canonicalize(),
            Err(fm::Infeasible) => Polyhedron::empty(self.ctx),
        }
    }

    /// Eliminates every clock.
    pub fn project_params(&self) -> Polyhedron {
        let clocks: Vec<usize> = (0..self.ctx.clocks).collect();
        self.eliminate_positions(&clocks)
    }

    /// The same constraint in the parameter-only context; fails if a clock
    /// still occurs.
    pub fn restrict_to_params(&self) -> Result<Polyhedron, ConstraintError> {
        let c = self.ctx.clocks;
        let target = self.ctx.params_only();
        if self.is_empty() {
            return Ok(Polyhedron::empty(target));
        }
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            if a.coeffs[..c].iter().any(|x| !x.is_zero()) {
                return Err(ConstraintError::ClockInParameterConstraint);
            }
            atoms.push(Inequality::new(
                a.coeffs[c..].to_vec(),
                a.constant.clone(),
                a.rel,
            ));
        }
        Ok(Polyhedron {
            ctx: target,
            atoms,
            canonical: self.canonical,
            empty: OnceLock::new(),
        })
    }

    /// Embeds a parameter-only polyhedron into a context with clocks.
    pub fn embed_params(&self, ctx: Context) -> Result<Polyhedron, ConstraintError> {
        if self.ctx.clocks != 0 || self.ctx.params != ctx.params {
            return Err(ConstraintError::ContextMismatch);
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let mut coeffs = vec![BigInt::zero(); ctx.clocks];
                coeffs.extend(a.coeffs.iter().cloned());
                Inequality::new(coeffs, a.constant.clone(), a.rel)
            })
            .collect();
        Ok(Polyhedron {
            ctx,
            atoms,
            canonical: self.canonical,
            empty: OnceLock::new(),
        })
    }

    /// Future closure: `{(w + d, v) | (w, v) ∈ self, d ≥ 0}`.
    pub fn time_elapse(&self) -> Polyhedron {
        if self.is_empty() {
            return Polyhedron::empty(self.ctx);
        }
        let n = self.ctx.dim();
        let clocks = self.ctx.clocks;
        let mut rows = Vec::with_capacity(self.atoms.len() + clocks);
        for a in &self.atoms {
            let mut coeffs = a.coeffs.clone();
            let shift: BigInt = a.coeffs[..clocks].iter().sum();
            coeffs.push(-shift);
            rows.push(Inequality::new(coeffs, a.constant.clone(), a.rel));
        }
        // the pre-delay clock values x - d are nonnegative
        for i in 0..clocks {
            let mut coeffs = vec![BigInt::zero(); n + 1];
            coeffs[i] = BigInt::from(-1);
            coeffs[n] = BigInt::from(1);
            rows.push(Inequality::new(coeffs, BigInt::zero(), Relation::Le));
        }
        match fm::project(n + 1, &rows, &[n]) {
            Ok(out) => Polyhedron {
                ctx: self.ctx,
                atoms: out
                    .into_iter()
                    .map(|mut a| {
                        a.coeffs.truncate(n);
                        a.normalize();
                        a
                    })
                    .collect(),
                canonical: false,
                empty: OnceLock::new(),
            }
            .canonicalize(),
            Err(fm::Infeasible) => Polyhedron::empty(self.ctx),
        }
    }

    /// Sets every clock in `clocks` to zero.
    pub fn reset(&self, clocks: &[Variable]) -> Polyhedron {
        if clocks.is_empty() {
            return self.canonicalize();
        }
        for v in clocks {
            assert_eq!(v.kind, VarKind::Clock, "reset of a non-clock variable");
        }
        let eliminated = self.eliminate(clocks);
        if eliminated.is_empty() {
            return eliminated;
        }
        let mut atoms = eliminated.atoms.clone();
        for v in clocks {
            let mut coeffs = vec![BigInt::zero(); self.ctx.dim()];
            coeffs[self.ctx.position(*v)] = BigInt::from(1);
            atoms.push(Inequality::new(coeffs, BigInt::zero(), Relation::Eq));
        }
        Polyhedron {
            ctx: self.ctx,
            atoms,
            canonical: false,
            empty: OnceLock::new(),
        }
        .canonicalize()
    }

    /// Whether every point of `other` lies in `self`.
    pub fn includes(&self, other: &Polyhedron) -> bool {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        if other.is_empty() {
            return true;
        }
        self.atoms.iter().all(|a| {
            a.negate().into_iter().all(|neg| {
                let mut atoms = other.atoms.clone();
                atoms.push(neg);
                fm::solve(self.ctx.dim(), &atoms).is_none()
            })
        })
    }

    /// Same point set.
    pub fn equivalent(&self, other: &Polyhedron) -> bool {
        self.includes(other) && other.includes(self)
    }

    /// Variables occurring with a nonzero coefficient.
    pub fn support(&self) -> Vec<Variable> {
        let mut seen = vec![false; self.ctx.dim()];
        for a in &self.atoms {
            for i in a.support() {
                seen[i] = true;
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(i, _)| self.ctx.variable(i))
            .collect()
    }

    pub fn canonicalize(&self) -> Polyhedron {
        if self.canonical {
            return self.clone();
        }
        match canonical_atoms(self.ctx.dim(), &self.atoms) {
            Some(atoms) => Polyhedron {
                ctx: self.ctx,
                atoms,
                canonical: true,
                empty: OnceLock::from(false),
            },
            None => Polyhedron::empty(self.ctx),
        }
    }
}

fn nonneg_row(dim: usize, pos: usize) -> Inequality {
    let mut coeffs = vec![BigInt::zero(); dim];
    coeffs[pos] = BigInt::from(-1);
    Inequality::new(coeffs, BigInt::zero(), Relation::Le)
}

/// Canonical atom list of a conjunction, or `None` if it is empty.
fn canonical_atoms(dim: usize, atoms: &[Inequality]) -> Option<Vec<Inequality>> {
    let sample = fm::solve(dim, atoms)?;

    // implicit equalities: non-strict constraints (including nonnegativity)
    // that no point satisfies strictly
    let mut eqs: Vec<Inequality> = Vec::new();
    let mut ineqs: Vec<Inequality> = Vec::new();
    let mut candidates: Vec<Inequality> = Vec::new();
    for a in atoms {
        match a.rel {
            Relation::Eq => eqs.push(a.clone()),
            Relation::Lt => ineqs.push(a.clone()),
            Relation::Le => candidates.push(a.clone()),
        }
    }
    let nonneg_candidates: Vec<Inequality> = (0..dim).map(|p| nonneg_row(dim, p)).collect();
    let mut known = atoms.to_vec();
    for (is_nonneg, cand) in candidates
        .into_iter()
        .map(|c| (false, c))
        .chain(nonneg_candidates.into_iter().map(|c| (true, c)))
    {
        if cand.is_trivial() {
            continue;
        }
        let tight_at_sample = {
            let strict = Inequality::new(cand.coeffs.clone(), cand.constant.clone(), Relation::Lt);
            !strict.holds_at(&sample)
        };
        let implicit = tight_at_sample && {
            let mut probe = known.clone();
            probe.push(Inequality::new(
                cand.coeffs.clone(),
                cand.constant.clone(),
                Relation::Lt,
            ));
            fm::solve(dim, &probe).is_none()
        };
        if implicit {
            let eq = Inequality::new(cand.coeffs.clone(), cand.constant.clone(), Relation::Eq);
            known.push(eq.clone());
            eqs.push(eq);
        } else if !is_nonneg {
            ineqs.push(cand);
        }
    }

    let basis = echelon(dim, &eqs);

    let mut reduced: Vec<Inequality> = Vec::new();
    for ineq in ineqs {
        let r = reduce(&ineq, &basis);
        match r.trivially_true() {
            Some(true) => {}
            Some(false) => return None,
            None => reduced.push(r),
        }
    }
    let reduced = tightest_per_direction(reduced);

    let mut kept = reduced;
    kept.sort_by(|a, b| a.canonical_cmp(b));
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let mut probe: Vec<Inequality> = basis.clone();
        for (j, other) in kept.iter().enumerate() {
            if j != i {
                probe.push(other.clone());
            }
        }
        let redundant = kept[i].negate().into_iter().all(|neg| {
            let mut p = probe.clone();
            p.push(neg);
            fm::solve(dim, &p).is_none()
        });
        if redundant {
            kept.remove(i);
        }
    }

    let mut out = basis;
    out.extend(kept);
    out.sort_by(|a, b| a.canonical_cmp(b));
    Some(out)
}

/// Reduced row-echelon basis of the equalities, primitive integer rows with
/// positive pivots.
fn echelon(dim: usize, eqs: &[Inequality]) -> Vec<Inequality> {
    let mut rows: Vec<(Vec<Rational>, Rational)> = eqs
        .iter()
        .map(|e| {
            (
                e.coeffs
                    .iter()
                    .map(|c| Rational::from_integer(c.clone()))
                    .collect(),
                Rational::from_integer(e.constant.clone()),
            )
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..dim {
        let Some(sel) = (pivot_row..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, sel);
        let piv = rows[pivot_row].0[col].clone();
        {
            let (coeffs, k) = &mut rows[pivot_row];
            for c in coeffs.iter_mut() {
                *c = &*c / &piv;
            }
            *k = &*k / &piv;
        }
        let (pc, pk) = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pivot_row || row.0[col].is_zero() {
                continue;
            }
            let f = row.0[col].clone();
            for (c, p) in row.0.iter_mut().zip(&pc) {
                *c -= &f * p;
            }
            row.1 -= &f * &pk;
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows.iter()
        .map(|(c, k)| from_rational_row(c, k, Relation::Eq))
        .collect()
}

/// Rewrites `ineq` so it has no weight on any pivot column of `basis`.
fn reduce(ineq: &Inequality, basis: &[Inequality]) -> Inequality {
    let mut cur = ineq.clone();
    for row in basis {
        let pivot = row
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .expect("zero row in basis");
        let a = cur.coeffs[pivot].clone();
        if a.is_zero() {
            continue;
        }
        let p = row.coeffs[pivot].clone();
        debug_assert!(p.is_positive());
        let coeffs = cur
            .coeffs
            .iter()
            .zip(&row.coeffs)
            .map(|(c, r)| &p * c - &a * r)
            .collect();
        let constant = &p * &cur.constant - &a * &row.constant;
        cur = Inequality::new(coeffs, constant, cur.rel);
    }
    cur
}

/// Among inequalities with proportional coefficient vectors keep the
/// tightest (strict wins ties).
fn tightest_per_direction(ineqs: Vec<Inequality>) -> Vec<Inequality> {
    let mut best: BTreeMap<Vec<BigInt>, (Rational, bool, Inequality)> = BTreeMap::new();
    for i in ineqs {
        let g = i
            .coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
        let dir: Vec<BigInt> = i.coeffs.iter().map(|c| c / &g).collect();
        let bound = Rational::new(i.constant.clone(), g);
        let strict = i.rel == Relation::Lt;
        let replace = match best.get(&dir) {
            None => true,
            Some((b, s, _)) => bound > *b || (bound == *b && strict && !*s),
        };
        if replace {
            best.insert(dir, (bound, strict, i));
        }
    }
    best.into_values().map(|(_, _, i)| i).collect()
}
