use super::state::{Affine, FrameState, N_D};
use crate::error::{Error, Result};
use crate::exact::Field;
use crate::nkgeom::levi_civita;

pub type Tensor3<F> = [[[F; 3]; 3]; 3];

fn delta<F: Field>(a: usize, b: usize) -> F {
    if a == b {
        F::one()
    } else {
        F::zero()
    }
}

/// `h_ij^k = |v|²(vᵢδ_jk + vⱼδ_ki + v_kδ_ij) − 5vᵢvⱼv_k`.
pub fn hijk_from_v<F: Field>(v: &[F; 3]) -> Tensor3<F> {
    let n = v.iter().fold(F::zero(), |acc, x| acc + x.clone() * x.clone());
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                n.clone() * (v[i].clone() * delta(j, k) + v[j].clone() * delta(k, i) + v[k].clone() * delta(i, j))
                    - F::from_i64(5) * v[i].clone() * v[j].clone() * v[k].clone()
            })
        })
    })
}

/// `∂h_jk^l / ∂v_m`.
fn dh<F: Field>(v: &[F; 3], j: usize, k: usize, l: usize, m: usize) -> F {
    let n = v.iter().fold(F::zero(), |acc, x| acc + x.clone() * x.clone());
    let lin = v[j].clone() * delta(k, l) + v[k].clone() * delta(l, j) + v[l].clone() * delta(j, k);
    let dlin: F = delta::<F>(j, m) * delta(k, l) + delta::<F>(k, m) * delta(l, j) + delta::<F>(l, m) * delta(j, k);
    let dcub = delta::<F>(j, m) * v[k].clone() * v[l].clone()
        + v[j].clone() * delta(k, m) * v[l].clone()
        + v[j].clone() * v[k].clone() * delta(l, m);
    F::from_i64(2) * v[m].clone() * lin + n * dlin - F::from_i64(5) * dcub
}

/// Connection components `ω_ij^k` from the nine closed forms, extended by
/// `ω_ij^k = −ω_ik^j`.
pub fn omega_from_state<F: Field>(st: &FrameState<F>) -> Tensor3<F> {
    let [v1, v2, v3] = st.v.clone();
    let sq = |x: &F| x.clone() * x.clone();
    let four = F::from_i64(4);
    let five = F::from_i64(5);
    let base = (F::from_i64(2) * F::sqrt3()).inv().expect("2√3 is invertible");
    let p1 = -four.clone() * sq(&v1) + sq(&v2) + sq(&v3);
    let p2 = sq(&v1) - four.clone() * sq(&v2) + sq(&v3);
    let p3 = sq(&v1) + sq(&v2) - four * sq(&v3);
    let triple = five * v1.clone() * v2.clone() * v3.clone();
    let given = [
        ((0, 0, 1), -(v2.clone() * p1.clone() * st.cot_diff(0, 1))),
        ((0, 0, 2), -(v3.clone() * p1 * st.cot_diff(0, 2))),
        ((1, 1, 0), -(v1.clone() * p2.clone() * st.cot_diff(1, 0))),
        ((1, 1, 2), -(v3 * p2 * st.cot_diff(1, 2))),
        ((2, 2, 0), -(v1 * p3.clone() * st.cot_diff(2, 0))),
        ((2, 2, 1), -(v2 * p3 * st.cot_diff(2, 1))),
        ((0, 1, 2), base.clone() + triple.clone() * st.cot_diff(1, 2)),
        ((1, 2, 0), base.clone() + triple.clone() * st.cot_diff(2, 0)),
        ((2, 0, 1), base + triple * st.cot_diff(0, 1)),
    ];
    let mut w: Tensor3<F> = std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| F::zero())));
    for ((i, j, k), val) in given {
        w[i][k][j] = -val.clone();
        w[i][j][k] = val;
    }
    w
}

/// Precomputed data for evaluating Codazzi components at one state.
pub struct CodazziSystem<F> {
    h: Tensor3<F>,
    w: Tensor3<F>,
    dh: [[[[F; 3]; 3]; 3]; 3],
    inv_sqrt3: F,
    third: F,
    sin2: [[F; 3]; 3],
}

impl<F: Field> CodazziSystem<F> {
    pub fn new(st: &FrameState<F>) -> Self {
        let v = &st.v;
        Self {
            h: hijk_from_v(v),
            w: omega_from_state(st),
            dh: std::array::from_fn(|j| {
                std::array::from_fn(|k| std::array::from_fn(|l| std::array::from_fn(|m| dh(v, j, k, l, m))))
            }),
            inv_sqrt3: F::sqrt3().inv().expect("√3 is invertible"),
            third: F::from_i64(3).inv().expect("3 is invertible"),
            sin2: std::array::from_fn(|a| std::array::from_fn(|b| st.sin2_diff(a, b))),
        }
    }

    /// JE_l-component of `(∇̄h)(Eᵢ,Eⱼ,E_k)` with `Eᵢ(h)` expanded through `D`.
    fn t(&self, i: usize, j: usize, k: usize, l: usize) -> Affine<F> {
        let mut out = Affine::zero();
        for m in 0..3 {
            out.grad[3 * i + m] = self.dh[j][k][l][m].clone();
        }
        let mut c = F::zero();
        for m in 0..3 {
            let g = self.inv_sqrt3.clone() * F::from_i64(i64::from(levi_civita(i, m, l)));
            c = c + self.h[j][k][m].clone() * (self.w[i][m][l].clone() - g);
            c = c - self.w[i][j][m].clone() * self.h[m][k][l].clone();
            c = c - self.w[i][k][m].clone() * self.h[j][m][l].clone();
        }
        out.constant = c;
        out
    }

    /// Scalar Codazzi defect for the quadruple `(i, j, k, l)`, zero-based.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> Affine<F> {
        let curv = self.third.clone()
            * self.sin2[i][j].clone()
            * (delta::<F>(j, k) * delta(i, l) + delta::<F>(i, k) * delta(j, l));
        let mut out = self.t(i, j, k, l).sub(&self.t(j, i, k, l));
        out.constant = out.constant - curv;
        out
    }

    pub fn h(&self) -> &Tensor3<F> {
        &self.h
    }

    pub fn omega(&self) -> &Tensor3<F> {
        &self.w
    }
}

/// Index `(i, j, k, l)` of a scalar Codazzi component.
pub type ComponentIndex = (usize, usize, usize, usize);

/// The 27 independent scalars, ordered by `(i<j, k, l)` with pairs (0,1), (0,2), (1,2).
pub fn codazzi_components<F: Field>(st: &FrameState<F>) -> Vec<(ComponentIndex, Affine<F>)> {
    let sys = CodazziSystem::new(st);
    let mut out = Vec::with_capacity(27);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for k in 0..3 {
            for l in 0..3 {
                out.push(((i, j, k, l), sys.component(i, j, k, l)));
            }
        }
    }
    out
}

/// Result of eliminating selected unknowns from a set of Codazzi components.
#[derive(Clone, Debug)]
pub struct TripleSolution<F> {
    pub rank: usize,
    /// `(unknown, expression)`; expressions are affine in the remaining indeterminates.
    pub solution: Vec<(usize, Affine<F>)>,
    /// Unknowns left undetermined.
    pub free: Vec<usize>,
    /// Non-trivial constraints left after elimination, free of the unknowns.
    pub leftovers: Vec<Affine<F>>,
    /// Number of input rows that were identically zero.
    pub zero_rows: usize,
}

impl<F: Field> TripleSolution<F> {
    pub fn get(&self, unknown: usize) -> Option<&Affine<F>> {
        self.solution.iter().find(|(u, _)| *u == unknown).map(|(_, e)| e)
    }

    pub fn require_full_rank(&self) -> Result<&Self> {
        if self.free.is_empty() {
            Ok(self)
        } else {
            Err(Error::Singular(format!("unknowns {:?} are not determined (rank {})", self.free, self.rank)))
        }
    }

    /// Replaces every solved unknown inside `e`.
    pub fn apply(&self, e: &Affine<F>) -> Affine<F> {
        self.solution.iter().fold(e.clone(), |acc, (u, s)| acc.substitute(*u, s))
    }
}

/// Gauss–Jordan elimination of `unknowns` from the components of the given
/// `(i, j, k)` triples (all `l`), with the `vanishing` indeterminates set to zero.
pub fn solve_triple_system<F: Field>(
    st: &FrameState<F>,
    triples: &[(usize, usize, usize)],
    unknowns: &[usize],
    vanishing: &[usize],
) -> Result<TripleSolution<F>> {
    if triples.iter().any(|&(i, j, k)| i > 2 || j > 2 || k > 2) || unknowns.iter().any(|&u| u >= N_D) {
        return Err(Error::Domain("frame indices are 0..3 and unknowns 0..9".into()));
    }
    let sys = CodazziSystem::new(st);
    let rows: Vec<Affine<F>> = triples
        .iter()
        .flat_map(|&(i, j, k)| (0..3).map(move |l| (i, j, k, l)))
        .map(|(i, j, k, l)| sys.component(i, j, k, l).restrict(vanishing))
        .collect();
    Ok(eliminate(rows, unknowns))
}

/// Elimination on explicit rows; exposed for callers that assemble their own systems.
pub fn eliminate<F: Field>(mut rows: Vec<Affine<F>>, unknowns: &[usize]) -> TripleSolution<F> {
    let zero_rows = rows.iter().filter(|r| r.is_zero()).count();
    let mut used = vec![false; rows.len()];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut free = Vec::new();
    for &u in unknowns {
        let best = (0..rows.len())
            .filter(|&r| !used[r] && !rows[r].grad[u].is_negligible())
            .max_by(|&a, &b| rows[a].grad[u].magnitude().total_cmp(&rows[b].grad[u].magnitude()));
        let Some(p) = best else {
            free.push(u);
            continue;
        };
        used[p] = true;
        let inv = rows[p].grad[u].inv().expect("pivot is nonzero");
        rows[p] = rows[p].scale(&inv);
        rows[p].grad[u] = F::one();
        let prow = rows[p].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != p && !row.grad[u].is_negligible() {
                let f = row.grad[u].clone();
                *row = row.sub(&prow.scale(&f));
                row.grad[u] = F::zero();
            }
        }
        pivots.push((p, u));
    }
    let solution = pivots
        .iter()
        .map(|&(p, u)| {
            let mut e = rows[p].scale(&-F::one());
            e.grad[u] = F::zero();
            (u, e)
        })
        .collect();
    let leftovers =
        rows.iter().enumerate().filter(|(r, row)| !used[*r] && !row.is_zero()).map(|(_, row)| row.clone()).collect();
    TripleSolution { rank: pivots.len(), solution, free, leftovers, zero_rows }
}
