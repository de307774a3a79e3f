use serde::Serialize;

use super::MixedProfile;
use crate::error::{Error, Result};
use crate::numeric::{solve_linear, Matrix, Scalar};

/// An equilibrium of the two-player zero-sum game `A`, where the row player
/// receives `x^T A y` and the column player its negation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSumSolution<T> {
    pub profile: MixedProfile<T>,
    /// Row player's equilibrium payoff.
    pub value: T,
}

/// Support enumeration over square support pairs `(I, J)`.
///
/// For each pair the bordered systems `x_I^T A_{I,J} = v 1`, `1^T x_I = 1`
/// and `A_{I,J} y_J = v 1`, `1^T y_J = 1` are solved; a solution is accepted
/// when both mixtures are nonnegative and no pure deviation beats `v`. Every
/// finite zero-sum game has an extreme equilibrium of this form, so exhausting
/// the search without a hit indicates a numerical problem.
///
/// Rational inputs are solved exactly. Strategy counts are capped by
/// [`Scalar::SOLVER_MAX_STRATEGIES`].
pub fn solve_2p_zero_sum<T: Scalar>(a: &Matrix<T>) -> Result<ZeroSumSolution<T>> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::Shape("empty payoff matrix".into()));
    }
    if m.max(n) > T::SOLVER_MAX_STRATEGIES {
        return Err(Error::SizeLimit(format!(
            "support enumeration limited to {} strategies per agent, got {m}x{n}",
            T::SOLVER_MAX_STRATEGIES
        )));
    }
    let tol = if T::EXACT { 0.0 } else { 1e-9 };
    for k in 1..=m.min(n) {
        for rows in combinations(m, k) {
            for cols in combinations(n, k) {
                if let Some(sol) = try_support(a, &rows, &cols, tol) {
                    return Ok(sol);
                }
            }
        }
    }
    Err(Error::NoEquilibrium)
}

fn try_support<T: Scalar>(
    a: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
    tol: f64,
) -> Option<ZeroSumSolution<T>> {
    let k = rows.len();
    let (m, n) = a.shape();

    // Row player: sum_i x_i A_ij - v = 0 for j in J, sum_i x_i = 1.
    let mut sys = Vec::with_capacity(k + 1);
    for &j in cols {
        let mut eq: Vec<T> = rows.iter().map(|&i| a.get(i, j).clone()).collect();
        eq.push(-T::one());
        sys.push(eq);
    }
    let mut last = vec![T::one(); k];
    last.push(T::zero());
    sys.push(last);
    let mut rhs = vec![T::zero(); k];
    rhs.push(T::one());
    let sol_x = solve_linear(sys, rhs)?;
    let v = sol_x[k].clone();

    // Column player: sum_j A_ij y_j - w = 0 for i in I, sum_j y_j = 1.
    let mut sys = Vec::with_capacity(k + 1);
    for &i in rows {
        let mut eq: Vec<T> = cols.iter().map(|&j| a.get(i, j).clone()).collect();
        eq.push(-T::one());
        sys.push(eq);
    }
    let mut last = vec![T::one(); k];
    last.push(T::zero());
    sys.push(last);
    let mut rhs = vec![T::zero(); k];
    rhs.push(T::one());
    let sol_y = solve_linear(sys, rhs)?;

    if sol_x[..k]
        .iter()
        .chain(&sol_y[..k])
        .any(|p| (-p.clone()).exceeds(tol))
    {
        return None;
    }

    let mut x = vec![T::zero(); m];
    for (&i, p) in rows.iter().zip(&sol_x) {
        x[i] = clamp_nonneg(p.clone());
    }
    let mut y = vec![T::zero(); n];
    for (&j, p) in cols.iter().zip(&sol_y) {
        y[j] = clamp_nonneg(p.clone());
    }

    // No profitable deviation for either player.
    if a.mul_vec(&y)
        .into_iter()
        .any(|r| (r - v.clone()).exceeds(tol))
    {
        return None;
    }
    if a.vec_mul(&x)
        .into_iter()
        .any(|c| (v.clone() - c).exceeds(tol))
    {
        return None;
    }
    Some(ZeroSumSolution {
        profile: MixedProfile::from_vecs_unchecked(vec![x, y]),
        value: v,
    })
}

fn clamp_nonneg<T: Scalar>(p: T) -> T {
    if p.is_negative() {
        T::zero()
    } else {
        p
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
