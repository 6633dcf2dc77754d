//! Scalar helpers shared by the ring layer and the normal-form engines:
//! gcds with cofactors, residue arithmetic, unit lifts and a deterministic
//! primality test.

/// Extended gcd over the integers: returns `(g, x, y)` with `x*a + y*b = g`, `g >= 0`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = xgcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub fn addmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

#[inline]
pub fn submod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + n as u128 - b as u128 % n as u128) % n as u128) as u64
}

#[inline]
pub fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc: u64 = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, n);
        }
        base = mulmod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `n` when `gcd(a, n) = 1`.
pub fn invmod(a: u64, n: u64) -> Option<u64> {
    let (g, x, _) = xgcd(a as i128, n as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(n as i128) as u64)
}

/// A unit `w` modulo `n` with `w * a = gcd(a, n) (mod n)`.
///
/// Used to normalize leading entries of Howell forms and mod-n Smith pivots.
pub fn unit_lift(a: u64, n: u64) -> u64 {
    let a = a % n;
    if a == 0 {
        return 1 % n;
    }
    let d = gcd_u64(a, n);
    let a1 = a / d;
    let m = n / d;
    // a1 is invertible mod m; lift its inverse to a unit mod n.
    let mut w = invmod(a1 % m, m).unwrap_or(1) % n;
    if w == 0 {
        w = 1 % n;
    }
    while gcd_u64(w, n) != 1 {
        w = (w + m) % n;
        debug_assert!(w != 0);
    }
    debug_assert_eq!(mulmod(w, a, n), d % n);
    w
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Invert a k-by-k matrix over Z/n (row-major). Returns `None` when not invertible.
///
/// Row reduction with gcd-combining 2x2 blocks (which are invertible over Z/n),
/// so the transform stays a genuine inverse when the reduction reaches the identity.
pub fn invert_mod(a: &[u64], k: usize, n: u64) -> Option<Vec<u64>> {
    assert_eq!(a.len(), k * k);
    let mut h: Vec<u64> = a.iter().map(|&x| x % n).collect();
    let mut t: Vec<u64> = vec![0; k * k];
    for i in 0..k {
        t[i * k + i] = 1 % n;
    }
    for col in 0..k {
        // combine rows >= col to make h[col][col] = gcd of the column tail
        let mut pivot_found = false;
        for row in col..k {
            if h[row * k + col] != 0 {
                if !pivot_found {
                    for j in 0..k {
                        h.swap(col * k + j, row * k + j);
                        t.swap(col * k + j, row * k + j);
                    }
                    pivot_found = true;
                } else {
                    let p = h[col * k + col];
                    let q = h[row * k + col];
                    let (g, x, y) = xgcd(p as i128, q as i128);
                    let g = g as u64;
                    let x = x.rem_euclid(n as i128) as u64;
                    let y = y.rem_euclid(n as i128) as u64;
                    let u = (p / g) % n;
                    let v = (q / g) % n;
                    for j in 0..k {
                        let hp = h[col * k + j];
                        let hr = h[row * k + j];
                        h[col * k + j] = addmod(mulmod(x, hp, n), mulmod(y, hr, n), n);
                        h[row * k + j] = submod(mulmod(u, hr, n), mulmod(v, hp, n), n);
                        let tp = t[col * k + j];
                        let tr = t[row * k + j];
                        t[col * k + j] = addmod(mulmod(x, tp, n), mulmod(y, tr, n), n);
                        t[row * k + j] = submod(mulmod(u, tr, n), mulmod(v, tp, n), n);
                    }
                }
            }
        }
        let piv = h[col * k + col];
        let w = invmod(piv, n)?;
        for j in 0..k {
            h[col * k + j] = mulmod(w, h[col * k + j], n);
            t[col * k + j] = mulmod(w, t[col * k + j], n);
        }
        for row in 0..k {
            if row != col {
                let f = h[row * k + col];
                if f != 0 {
                    for j in 0..k {
                        let sub = mulmod(f, h[col * k + j], n);
                        h[row * k + j] = submod(h[row * k + j], sub, n);
                        let subt = mulmod(f, t[col * k + j], n);
                        t[row * k + j] = submod(t[row * k + j], subt, n);
                    }
                }
            }
        }
    }
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xgcd_basic() {
        let (g, x, y) = xgcd(12, 18);
        assert_eq!(g, 6);
        assert_eq!(x * 12 + y * 18, 6);
        assert_eq!(xgcd(0, 0).0, 0);
        assert_eq!(xgcd(-4, 6).0, 2);
    }

    #[test]
    fn unit_lift_examples() {
        // 2 mod 4: gcd 2, unit 1 or 3
        for (a, n) in [(2u64, 4u64), (6, 12), (4, 12), (9, 12), (5, 12), (8, 16)] {
            let w = unit_lift(a, n);
            assert_eq!(gcd_u64(w, n), 1);
            assert_eq!(mulmod(w, a, n), gcd_u64(a, n) % n);
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(4));
        assert!(is_prime_u64(97));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007u64 * 3));
    }

    #[test]
    fn invert_mod_small() {
        // [[1,1],[0,1]] over Z/4
        let inv = invert_mod(&[1, 1, 0, 1], 2, 4).unwrap();
        assert_eq!(inv, vec![1, 3, 0, 1]);
        // [[2,0],[0,1]] not invertible over Z/4
        assert!(invert_mod(&[2, 0, 0, 1], 2, 4).is_none());
        // 1x1
        assert_eq!(invert_mod(&[5], 1, 12).unwrap(), vec![5]);
    }
}
