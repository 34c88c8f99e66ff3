//! Quasi-norm evaluation for the finite-dimensional sequence-space kinds the
//! catalog uses, together with the polyhedral unit-ball vertex oracle and the
//! p-convexity exponent each kind satisfies exactly.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Which quasi-norm formula the space carries.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    /// `(sum |f_i|^p)^{1/p}`; `p = inf` is the sup norm (finite section of c_0).
    Lp { p: f64 },
    /// `(sum_n a_n^q n^{q/p-1})^{1/q}` over the non-increasing rearrangement
    /// `a`; requires `q <= p`. `q = inf` degenerates to weak-lp.
    Lorentz { p: f64, q: f64 },
    /// `sup_n a_n n^{1/p}` over the non-increasing rearrangement.
    WeakLp { p: f64 },
    /// Outer lp norm of per-block euclidean norms; blocks partition 1..n in
    /// order.
    DirectSumL2Blocks {
        outer_p: f64,
        block_sizes: Vec<usize>,
    },
    /// `||f|| = ||M^{-1} f||_base`: the unit ball is `M * (base ball)`.
    LinearImage {
        base: Box<Space>,
        map: Matrix,
        inverse: Matrix,
    },
}

/// A finite-dimensional quasi-normed sequence space.
///
/// `p_convexity` is the exponent r for which the *literal* quasi-norm
/// satisfies `||f+g||^r <= ||f||^r + ||g||^r`; it is derived per kind at
/// construction, never supplied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    kind: NormKind,
    dim: usize,
    p_convexity: f64,
}

impl Space {
    pub fn lp(p: f64, dim: usize) -> Result<Space> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("lp exponent must be positive, got {p}")));
        }
        let p_convexity = if p.is_infinite() { 1.0 } else { p.min(1.0) };
        Ok(Space {
            kind: NormKind::Lp { p },
            dim,
            p_convexity,
        })
    }

    pub fn lp_inf(dim: usize) -> Result<Space> {
        Space::lp(f64::INFINITY, dim)
    }

    /// Lorentz sequence space on `dim` coordinates. `q = inf` is accepted and
    /// evaluates as weak-lp (the usual modification of the series formula).
    pub fn lorentz(p: f64, q: f64, dim: usize) -> Result<Space> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lorentz exponents must be positive, got p={p}, q={q}"
            )));
        }
        if q.is_finite() && q > p {
            // The literal formula with q > p has no clean exact convexity
            // exponent; the catalog never needs that range.
            return Err(Error::InvalidParameter(format!(
                "lorentz requires q <= p, got p={p}, q={q}"
            )));
        }
        let p_convexity = if q.is_infinite() {
            weak_lp_convexity(p)
        } else {
            q.min(1.0)
        };
        Ok(Space {
            kind: NormKind::Lorentz { p, q },
            dim,
            p_convexity,
        })
    }

    pub fn weak_lp(p: f64, dim: usize) -> Result<Space> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weak-lp exponent must be positive and finite, got {p}"
            )));
        }
        Ok(Space {
            kind: NormKind::WeakLp { p },
            dim,
            p_convexity: weak_lp_convexity(p),
        })
    }

    pub fn l2_blocks(outer_p: f64, block_sizes: &[usize]) -> Result<Space> {
        if block_sizes.is_empty() || block_sizes.iter().any(|&b| b == 0) {
            return Err(Error::InvalidParameter("block sizes must be positive".into()));
        }
        if !(outer_p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "outer exponent must be positive, got {outer_p}"
            )));
        }
        let dim = block_sizes.iter().sum();
        let p_convexity = if outer_p.is_infinite() {
            1.0
        } else {
            outer_p.min(1.0)
        };
        Ok(Space {
            kind: NormKind::DirectSumL2Blocks {
                outer_p,
                block_sizes: block_sizes.to_vec(),
            },
            dim,
            p_convexity,
        })
    }

    /// Space whose unit ball is `map * (base ball)`; `map` must be square,
    /// invertible, and of the base dimension.
    pub fn linear_image(base: Space, map: Matrix) -> Result<Space> {
        if !map.is_square() || map.n_rows() != base.dim {
            return Err(Error::DimensionMismatch {
                expected: base.dim,
                got: map.n_rows(),
            });
        }
        let inverse = map.inverse()?;
        let dim = base.dim;
        let p_convexity = base.p_convexity;
        Ok(Space {
            kind: NormKind::LinearImage {
                base: Box::new(base),
                map,
                inverse,
            },
            dim,
            p_convexity,
        })
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p_convexity(&self) -> f64 {
        self.p_convexity
    }

    /// True when the norm is monotone under entrywise shrinking of absolute
    /// values (everything except linear images).
    pub fn is_lattice(&self) -> bool {
        !matches!(self.kind, NormKind::LinearImage { .. })
    }

    /// True when the unit ball is a polytope, so suprema of convex functions
    /// over it are attained at the vertex set.
    pub fn is_polyhedral(&self) -> bool {
        match &self.kind {
            NormKind::Lp { p } => *p == 1.0 || p.is_infinite(),
            NormKind::LinearImage { base, .. } => base.is_polyhedral(),
            _ => false,
        }
    }

    pub fn validate_vector(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: f.len(),
            });
        }
        for (i, x) in f.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(())
    }

    /// Quasi-norm of `f`; validates length and finiteness.
    pub fn norm(&self, f: &[f64]) -> Result<f64> {
        self.validate_vector(f)?;
        Ok(self.norm_raw(f))
    }

    /// Quasi-norm without input validation, for enumeration hot paths.
    pub fn norm_raw(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.dim);
        match &self.kind {
            NormKind::Lp { p } => lp_norm(*p, f),
            NormKind::Lorentz { p, q } => {
                if q.is_infinite() {
                    weak_lp_norm(*p, f)
                } else {
                    lorentz_norm(*p, *q, f)
                }
            }
            NormKind::WeakLp { p } => weak_lp_norm(*p, f),
            NormKind::DirectSumL2Blocks {
                outer_p,
                block_sizes,
            } => {
                let mut block_norms = Vec::with_capacity(block_sizes.len());
                let mut offset = 0;
                for &b in block_sizes {
                    let mut acc = 0.0;
                    for &x in &f[offset..offset + b] {
                        acc += x * x;
                    }
                    block_norms.push(math::sqrt(acc));
                    offset += b;
                }
                lp_norm(*outer_p, &block_norms)
            }
            NormKind::LinearImage { base, inverse, .. } => {
                base.norm_raw(&inverse.mul_vec(f))
            }
        }
    }

    /// Full vertex set of the closed unit ball for polyhedral kinds.
    ///
    /// `cap_dim` bounds the dimension for kinds with exponentially many
    /// vertices (the sup-norm cube).
    pub fn unit_ball_vertices(&self, cap_dim: usize) -> Result<Vec<Vec<f64>>> {
        match &self.kind {
            NormKind::Lp { p } if *p == 1.0 => {
                let mut verts = Vec::with_capacity(2 * self.dim);
                for i in 0..self.dim {
                    for sign in [1.0, -1.0] {
                        let mut v = alloc::vec![0.0; self.dim];
                        v[i] = sign;
                        verts.push(v);
                    }
                }
                Ok(verts)
            }
            NormKind::Lp { p } if p.is_infinite() => {
                if self.dim > cap_dim {
                    return Err(Error::Capacity {
                        what: "sup-norm cube vertices (dimension cap)",
                        needed: self.dim as u64,
                        cap: cap_dim as u64,
                    });
                }
                let count = 1usize << self.dim;
                let mut verts = Vec::with_capacity(count);
                for mask in 0..count {
                    let v: Vec<f64> = (0..self.dim)
                        .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                        .collect();
                    verts.push(v);
                }
                Ok(verts)
            }
            NormKind::LinearImage { base, map, .. } => {
                let base_verts = base.unit_ball_vertices(cap_dim)?;
                Ok(base_verts.iter().map(|v| map.mul_vec(v)).collect())
            }
            _ => Err(Error::UnsupportedOracle(
                "unit-ball vertices exist only for polyhedral kinds (lp with p in {1, inf} and linear images)",
            )),
        }
    }

    /// Operator norm of the coordinate functional `f -> sum g_i f_i` over the
    /// unit ball, where a closed form exists. `None` for rearrangement-based
    /// kinds (callers fall back to probe estimation).
    pub fn dual_functional_norm(&self, g: &[f64]) -> Option<f64> {
        debug_assert_eq!(g.len(), self.dim);
        match &self.kind {
            NormKind::Lp { p } => Some(lp_dual_norm(*p, g)),
            NormKind::DirectSumL2Blocks {
                outer_p,
                block_sizes,
            } => {
                let mut block_norms = Vec::with_capacity(block_sizes.len());
                let mut offset = 0;
                for &b in block_sizes {
                    let mut acc = 0.0;
                    for &x in &g[offset..offset + b] {
                        acc += x * x;
                    }
                    block_norms.push(math::sqrt(acc));
                    offset += b;
                }
                Some(lp_dual_norm(*outer_p, &block_norms))
            }
            NormKind::LinearImage { base, map, .. } => {
                // sup over M*(base ball) of <g, f> = sup over base ball of <M^T g, b>
                base.dual_functional_norm(&map.transpose_mul_vec(g))
            }
            NormKind::Lorentz { .. } | NormKind::WeakLp { .. } => None,
        }
    }
}

/// Exact subadditivity exponent of the literal weak-lp quasi-norm.
fn weak_lp_convexity(p: f64) -> f64 {
    p / (1.0 + p)
}

fn lp_norm(p: f64, f: &[f64]) -> f64 {
    if p.is_infinite() {
        return math::max_abs(f);
    }
    if p == 1.0 {
        return f.iter().map(|x| math::abs(*x)).sum();
    }
    if p == 2.0 {
        return math::sqrt(f.iter().map(|x| x * x).sum());
    }
    let mut acc = 0.0;
    for &x in f {
        if x != 0.0 {
            acc += math::powf(math::abs(x), p);
        }
    }
    if acc == 0.0 {
        0.0
    } else {
        math::powf(acc, 1.0 / p)
    }
}

fn lp_dual_norm(p: f64, g: &[f64]) -> f64 {
    if p.is_infinite() {
        g.iter().map(|x| math::abs(*x)).sum()
    } else if p <= 1.0 {
        // For p < 1 the lp ball sits inside the l1 ball and contains its
        // extreme points, so the functional norm is still the sup norm.
        math::max_abs(g)
    } else {
        lp_norm(p / (p - 1.0), g)
    }
}

fn lorentz_norm(p: f64, q: f64, f: &[f64]) -> f64 {
    let a = rearrange_nonincreasing(f);
    let mut acc = 0.0;
    for (idx, &v) in a.iter().enumerate() {
        if v == 0.0 {
            break;
        }
        let n = (idx + 1) as f64;
        acc += math::powf(v, q) * math::powf(n, q / p - 1.0);
    }
    if acc == 0.0 {
        0.0
    } else {
        math::powf(acc, 1.0 / q)
    }
}

fn weak_lp_norm(p: f64, f: &[f64]) -> f64 {
    let a = rearrange_nonincreasing(f);
    let mut best = 0.0f64;
    for (idx, &v) in a.iter().enumerate() {
        if v == 0.0 {
            break;
        }
        best = best.max(v * math::powf((idx + 1) as f64, 1.0 / p));
    }
    best
}

/// Absolute values of `f`, sorted descending; ties keep the order induced by
/// ascending original index.
pub fn rearrange_nonincreasing(f: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = f.iter().map(|x| math::abs(*x)).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_spaces() -> Vec<Space> {
        let summing_map = {
            let mut m = Matrix::zeros(4, 4);
            for j in 0..4 {
                for i in 0..=j {
                    m.set(i, j, 1.0);
                }
            }
            m
        };
        vec![
            Space::lp(0.5, 4).unwrap(),
            Space::lp(1.0, 4).unwrap(),
            Space::lp(2.0, 4).unwrap(),
            Space::lp_inf(4).unwrap(),
            Space::lorentz(2.0, 1.0, 4).unwrap(),
            Space::lorentz(1.5, 1.0, 4).unwrap(),
            Space::weak_lp(1.0, 4).unwrap(),
            Space::l2_blocks(1.0, &[1, 3]).unwrap(),
            Space::linear_image(Space::lp_inf(4).unwrap(), summing_map).unwrap(),
        ]
    }

    #[test]
    fn lp_one_norm_is_the_sum() {
        let s = Space::lp(1.0, 3).unwrap();
        assert_eq!(s.norm(&[2.0, 1.0, 0.0]).unwrap(), 3.0);
    }

    #[test]
    fn lorentz_one_one_is_l1() {
        let s = Space::lorentz(1.0, 1.0, 3).unwrap();
        assert!(math::approx_eq(s.norm(&[1.0, 2.0, 0.0]).unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn weak_l1_of_harmonic_head_is_one() {
        let s = Space::weak_lp(1.0, 4).unwrap();
        let v = [1.0, 0.5, 1.0 / 3.0, 0.25];
        assert!(math::approx_eq(s.norm(&v).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn lorentz_two_one_example() {
        // Independent one-line oracle: sum a_n n^{1/p - 1} with p = 2, q = 1.
        let s = Space::lorentz(2.0, 1.0, 4).unwrap();
        let f: [f64; 4] = [1.0, 1.0, 0.0, 0.0];
        let mut a: Vec<f64> = f.iter().map(|x| x.abs()).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        let expected: f64 = a
            .iter()
            .enumerate()
            .map(|(i, v)| v * ((i + 1) as f64).powf(0.5 - 1.0))
            .sum();
        assert!(math::approx_eq(expected, 1.7071067811865475, 1e-12));
        assert!(math::approx_eq(s.norm(&f).unwrap(), expected, 1e-12));
    }

    #[test]
    fn rearrangement_examples() {
        assert_eq!(rearrange_nonincreasing(&[-3.0, 1.0, 2.0]), vec![3.0, 2.0, 1.0]);
        assert_eq!(rearrange_nonincreasing(&[0.0, 0.0, 0.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(rearrange_nonincreasing(&[1.0, 1.0, 2.0]), vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn vector_validation_errors() {
        let s = Space::lp(1.0, 2).unwrap();
        assert_eq!(
            s.norm(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
        assert_eq!(s.norm(&[1.0, f64::NAN]), Err(Error::NonFinite { index: 1 }));
    }

    #[test]
    fn cross_polytope_vertices() {
        let s = Space::lp(1.0, 2).unwrap();
        let v = s.unit_ball_vertices(16).unwrap();
        assert_eq!(v.len(), 4);
        for vert in &v {
            assert!(math::approx_eq(s.norm(vert).unwrap(), 1.0, 1e-12));
        }
    }

    #[test]
    fn cube_vertices_and_linear_image() {
        let s = Space::lp_inf(2).unwrap();
        let v = s.unit_ball_vertices(16).unwrap();
        assert_eq!(v.len(), 4);

        let map = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let img = Space::linear_image(s, map.clone()).unwrap();
        let vi = img.unit_ball_vertices(16).unwrap();
        assert_eq!(vi.len(), 4);
        for (b, m) in v.iter().zip(&vi) {
            assert_eq!(&map.mul_vec(b), m);
            assert!(math::approx_eq(img.norm(m).unwrap(), 1.0, 1e-9));
        }
    }

    #[test]
    fn non_polyhedral_kinds_refuse_vertices() {
        let s = Space::lp(2.0, 3).unwrap();
        assert!(matches!(
            s.unit_ball_vertices(16),
            Err(Error::UnsupportedOracle(_))
        ));
    }

    #[test]
    fn quasi_triangle_inequality_per_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for space in sample_spaces() {
            let r = space.p_convexity();
            for _ in 0..1000 {
                let f: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let g: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
                let lhs = math::powf(space.norm_raw(&sum), r);
                let rhs = math::powf(space.norm_raw(&f), r) + math::powf(space.norm_raw(&g), r);
                assert!(
                    lhs <= (1.0 + 1e-9) * rhs,
                    "quasi-triangle failed for {:?}: {lhs} > {rhs}",
                    space.kind()
                );
            }
        }
    }

    #[test]
    fn homogeneity_per_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa1fa);
        for space in sample_spaces() {
            for _ in 0..200 {
                let f: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let alpha: f64 = rng.random_range(-3.0..3.0);
                let scaled: Vec<f64> = f.iter().map(|x| alpha * x).collect();
                let lhs = space.norm_raw(&scaled);
                let rhs = math::abs(alpha) * space.norm_raw(&f);
                assert!(
                    math::approx_eq(lhs, rhs, 1e-12),
                    "homogeneity failed for {:?}",
                    space.kind()
                );
            }
        }
    }

    #[test]
    fn lorentz_pp_matches_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x10e2);
        for p in [0.5, 1.0, 2.0] {
            let lor = Space::lorentz(p, p, 5).unwrap();
            let lp = Space::lp(p, 5).unwrap();
            for _ in 0..200 {
                let f: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
                assert!(math::approx_eq(lor.norm_raw(&f), lp.norm_raw(&f), 1e-12));
            }
        }
    }

    #[test]
    fn vertex_max_dominates_probe_max() {
        // For polyhedral kinds the vertex max of a linear functional must
        // dominate the max over 10^4 random unit-norm probes.
        let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
        for n in [5usize, 8] {
            let summing_map = {
                let mut m = Matrix::zeros(n, n);
                for j in 0..n {
                    for i in 0..=j {
                        m.set(i, j, 1.0);
                    }
                }
                m
            };
            let spaces = [
                Space::lp(1.0, n).unwrap(),
                Space::lp_inf(n).unwrap(),
                Space::linear_image(Space::lp_inf(n).unwrap(), summing_map).unwrap(),
            ];
            for space in &spaces {
                let verts = space.unit_ball_vertices(16).unwrap();
                let g: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let vertex_max = verts
                    .iter()
                    .map(|v| g.iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max);
                for _ in 0..10_000 {
                    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let nrm = space.norm_raw(&raw);
                    if nrm == 0.0 {
                        continue;
                    }
                    let probe: Vec<f64> = raw.iter().map(|x| x / nrm).collect();
                    let val: f64 = g.iter().zip(&probe).map(|(a, b)| a * b).sum();
                    assert!(val <= vertex_max + 1e-9);
                }
            }
        }
    }

    #[test]
    fn dual_norm_closed_forms_dominate_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1);
        let spaces = [
            Space::lp(0.5, 4).unwrap(),
            Space::lp(1.0, 4).unwrap(),
            Space::lp(2.0, 4).unwrap(),
            Space::lp_inf(4).unwrap(),
            Space::l2_blocks(1.0, &[2, 2]).unwrap(),
        ];
        for space in &spaces {
            for _ in 0..20 {
                let g: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
                let dual = space.dual_functional_norm(&g).unwrap();
                let mut probed = 0.0f64;
                for _ in 0..2000 {
                    let raw: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let nrm = space.norm_raw(&raw);
                    if nrm == 0.0 {
                        continue;
                    }
                    let val: f64 =
                        g.iter().zip(&raw).map(|(a, b)| a * b).sum::<f64>().abs() / nrm;
                    probed = probed.max(val);
                }
                assert!(probed <= dual * (1.0 + 1e-9), "{:?}", space.kind());
            }
        }
    }

    #[test]
    fn lorentz_q_above_p_is_rejected() {
        assert!(Space::lorentz(1.0, 2.0, 3).is_err());
    }

    #[test]
    fn lorentz_with_infinite_q_is_weak_lp() {
        let lor = Space::lorentz(1.5, f64::INFINITY, 5).unwrap();
        let weak = Space::weak_lp(1.5, 5).unwrap();
        assert_eq!(lor.p_convexity(), weak.p_convexity());
        let mut rng = ChaCha8Rng::seed_from_u64(0x15);
        for _ in 0..100 {
            let f: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            assert_eq!(lor.norm_raw(&f), weak.norm_raw(&f));
        }
    }

    #[test]
    fn block_sums_with_sup_outer_norm() {
        let s = Space::l2_blocks(f64::INFINITY, &[2, 2]).unwrap();
        assert_eq!(s.p_convexity(), 1.0);
        // max of the block euclidean norms
        assert!(math::approx_eq(
            s.norm(&[3.0, 4.0, 1.0, 1.0]).unwrap(),
            5.0,
            1e-12
        ));
    }

    #[test]
    fn nested_linear_images_compose() {
        let shear = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let scale = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let inner = Space::linear_image(Space::lp_inf(2).unwrap(), shear.clone()).unwrap();
        let outer = Space::linear_image(inner, scale.clone()).unwrap();
        assert!(outer.is_polyhedral());
        let verts = outer.unit_ball_vertices(16).unwrap();
        assert_eq!(verts.len(), 4);
        for v in &verts {
            assert!(math::approx_eq(outer.norm(v).unwrap(), 1.0, 1e-9));
        }
        // norm agrees with undoing both maps by hand
        let f = [1.3, -0.4];
        let undone = shear
            .inverse()
            .unwrap()
            .mul_vec(&scale.inverse().unwrap().mul_vec(&f));
        assert!(math::approx_eq(
            outer.norm(&f).unwrap(),
            undone.iter().fold(0.0f64, |a, x| a.max(x.abs())),
            1e-12
        ));
    }
}
