use num_complex::Complex;

use crate::Real;

/// Eigenvalues of a dense Hermitian matrix (row-major, `d × d`) by cyclic
/// Jacobi rotations, returned in descending order.
///
/// Each rotation first removes the phase of a_pq with a diagonal unitary, then
/// applies the real symmetric Jacobi rotation.
pub fn hermitian_eigenvalues<T: Real>(matrix: &[Complex<T>], d: usize) -> Vec<T> {
    assert_eq!(matrix.len(), d * d, "matrix must be d x d");
    let mut a = matrix.to_vec();
    let idx = |i: usize, j: usize| i * d + j;
    let frob: T = a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
    if d > 1 && frob > T::zero() {
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..d {
                for q in p + 1..d {
                    off = off + a[idx(p, q)].norm_sqr();
                }
            }
            let negligible = T::epsilon() * T::lit(1e-3) * frob;
            if off.sqrt() <= negligible {
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    let apq = a[idx(p, q)];
                    let mag = apq.norm();
                    if mag <= negligible {
                        a[idx(p, q)] = Complex::new(T::zero(), T::zero());
                        a[idx(q, p)] = Complex::new(T::zero(), T::zero());
                        continue;
                    }
                    let app = a[idx(p, p)].re;
                    let aqq = a[idx(q, q)].re;
                    let tau = (aqq - app) / (T::lit(2.0) * mag);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    let phase = (apq / mag).conj();
                    for k in 0..d {
                        if k == p || k == q {
                            continue;
                        }
                        let x = a[idx(k, p)];
                        let y = a[idx(k, q)] * phase;
                        let new_p = x * c - y * s;
                        let new_q = x * s + y * c;
                        a[idx(k, p)] = new_p;
                        a[idx(p, k)] = new_p.conj();
                        a[idx(k, q)] = new_q;
                        a[idx(q, k)] = new_q.conj();
                    }
                    a[idx(p, p)] = Complex::new(app - t * mag, T::zero());
                    a[idx(q, q)] = Complex::new(aqq + t * mag, T::zero());
                    a[idx(p, q)] = Complex::new(T::zero(), T::zero());
                    a[idx(q, p)] = Complex::new(T::zero(), T::zero());
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..d).map(|i| a[idx(i, i)].re).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    ev
}
