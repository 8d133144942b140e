use super::linear::{Context, Inequality, Rational};
use super::polyhedron::Polyhedron;
use super::ConstraintError;

use num_bigint::BigInt;
use num_traits::Zero;

/// Finite union of nonempty canonical polyhedra over one context, kept
/// sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DisjunctiveConstraint {
    ctx: Context,
    disjuncts: Vec<Polyhedron>,
}

impl DisjunctiveConstraint {
    pub fn falsum(ctx: Context) -> Self {
        DisjunctiveConstraint {
            ctx,
            disjuncts: Vec::new(),
        }
    }

    pub fn verum(ctx: Context) -> Self {
        DisjunctiveConstraint {
            ctx,
            disjuncts: vec![Polyhedron::universe(ctx)],
        }
    }

    pub fn from_polyhedra(ctx: Context, parts: impl IntoIterator<Item = Polyhedron>) -> Self {
        let mut disjuncts: Vec<Polyhedron> = Vec::new();
        for p in parts {
            assert_eq!(p.context(), ctx, "context mismatch");
            let p = p.canonicalize();
            if !p.is_empty() {
                disjuncts.push(p);
            }
        }
        disjuncts.sort();
        disjuncts.dedup();
        DisjunctiveConstraint { ctx, disjuncts }
    }

    pub fn from_polyhedron(p: Polyhedron) -> Self {
        Self::from_polyhedra(p.context(), [p])
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn disjuncts(&self) -> &[Polyhedron] {
        &self.disjuncts
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn contains_point(&self, point: &[Rational]) -> bool {
        self.disjuncts.iter().any(|d| d.contains_point(point))
    }

    pub fn union(&self, other: &DisjunctiveConstraint) -> Self {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        Self::from_polyhedra(
            self.ctx,
            self.disjuncts.iter().chain(&other.disjuncts).cloned(),
        )
    }

    pub fn or(&self, p: &Polyhedron) -> Self {
        Self::from_polyhedra(self.ctx, self.disjuncts.iter().cloned().chain([p.clone()]))
    }

    pub fn intersect_polyhedron(&self, p: &Polyhedron) -> Self {
        Self::from_polyhedra(self.ctx, self.disjuncts.iter().map(|d| d.intersect(p)))
            .drop_subsumed()
    }

    /// Pairwise intersection of disjuncts.
    pub fn intersect(&self, other: &DisjunctiveConstraint) -> Self {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        let mut parts = Vec::new();
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                parts.push(a.intersect(b));
            }
        }
        Self::from_polyhedra(self.ctx, parts).drop_subsumed()
    }

    /// Complement within the nonnegative orthant.
    pub fn complement(&self) -> Self {
        let mut acc = Self::verum(self.ctx);
        for d in &self.disjuncts {
            if d.is_universe() {
                return Self::falsum(self.ctx);
            }
            let mut negs: Vec<Inequality> = Vec::new();
            for a in d.inequalities() {
                negs.extend(a.negate());
            }
            let mut parts = Vec::new();
            for base in &acc.disjuncts {
                for n in &negs {
                    parts.push(base.with_atom(n.clone()));
                }
            }
            acc = Self::from_polyhedra(self.ctx, parts).drop_subsumed();
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// Removes disjuncts contained in another disjunct.
    pub fn drop_subsumed(mut self) -> Self {
        let mut keep = vec![true; self.disjuncts.len()];
        for i in 0..self.disjuncts.len() {
            for j in 0..self.disjuncts.len() {
                if i != j && keep[j] && keep[i] && self.disjuncts[j].includes(&self.disjuncts[i]) {
                    keep[i] = false;
                }
            }
        }
        let mut it = keep.into_iter();
        self.disjuncts.retain(|_| it.next().unwrap());
        self
    }

    /// Whether every point of `other` lies in `self`.
    pub fn includes(&self, other: &DisjunctiveConstraint) -> bool {
        other.intersect(&self.complement()).is_empty()
    }

    pub fn equivalent(&self, other: &DisjunctiveConstraint) -> bool {
        self.includes(other) && other.includes(self)
    }

    /// Some point `w ≠ point` in a disjunct that also contains `point`; the
    /// segment between them then stays inside that convex disjunct.
    pub fn contains_other_point(
        &self,
        point: &[Rational],
    ) -> Result<Option<Vec<Rational>>, ConstraintError> {
        if !self.contains_point(point) {
            return Err(ConstraintError::PointOutside);
        }
        let dim = self.ctx.dim();
        for d in self.disjuncts.iter().filter(|d| d.contains_point(point)) {
            for pos in 0..dim {
                for flip in [false, true] {
                    let mut coeffs = vec![BigInt::zero(); dim];
                    let v = &point[pos];
                    // den·x - num < 0  or  num - den·x < 0
                    let (num, den) = (v.numer().clone(), v.denom().clone());
                    let (c, k) = if flip { (-den, num) } else { (den, -num) };
                    coeffs[pos] = c;
                    let cut = Inequality::new(coeffs, k, super::linear::Relation::Lt);
                    if let Some(w) = d.with_atom(cut).sample_point() {
                        return Ok(Some(w));
                    }
                }
            }
        }
        Ok(None)
    }
}
