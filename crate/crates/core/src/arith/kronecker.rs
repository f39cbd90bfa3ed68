// (2/n) for odd n, indexed by n mod 8.
const TWO_TABLE: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i32 {
    assert!(n > 0 && n % 2 == 1, "jacobi: modulus must be odd and positive");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut k = 1;
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= TWO_TABLE[(n & 7) as usize];
        }
        // quadratic reciprocity
        if a & n & 2 != 0 {
            k = -k;
        }
        let r = a;
        a = n % r;
        n = r;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// Kronecker symbol `(d/m)`, extended to every integer `m` including zero,
/// negative and even values.
pub fn kronecker(d: i64, m: i64) -> i32 {
    if m == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    if d % 2 == 0 && m % 2 == 0 {
        return 0;
    }
    let v = m.trailing_zeros();
    let mut m = m >> v;
    let mut k = if v.is_multiple_of(2) { 1 } else { TWO_TABLE[(d & 7) as usize] };
    if m < 0 {
        m = -m;
        if d < 0 {
            k = -k;
        }
    }
    k * jacobi(d, m)
}
