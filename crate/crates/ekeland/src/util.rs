//! Pairing functions and small combinatorial helpers.

/// Cantor pairing `<x, y> = (x+y)(x+y+1)/2 + y`, increasing in both arguments.
pub fn pair(x: u64, y: u64) -> u64 {
    let s = x + y;
    s * (s + 1) / 2 + y
}

pub fn unpair(z: u64) -> (u64, u64) {
    let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

/// Splits `i` into `n` naturals by repeated unpairing (onto, not injective for n = 0).
pub fn unpair_n(mut i: u64, n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        if j + 1 == n {
            out.push(i);
        } else {
            let (a, b) = unpair(i);
            out.push(a);
            i = b;
        }
    }
    out
}

/// All sequences of the given length with entries below `base`, in lexicographic order.
pub fn words(base: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * base as usize);
        for w in &out {
            for d in 0..base {
                let mut v = w.clone();
                v.push(d);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_is_a_bijection_on_a_prefix() {
        for z in 0..5000 {
            let (x, y) = unpair(z);
            assert_eq!(pair(x, y), z);
        }
    }

    #[test]
    fn pairing_is_increasing() {
        for x in 0..30 {
            for y in 0..30 {
                assert!(pair(x + 1, y) > pair(x, y));
                assert!(pair(x, y + 1) > pair(x, y));
                assert!(pair(x, 0) >= x);
            }
        }
    }

    #[test]
    fn words_are_lexicographic() {
        let w = words(2, 2);
        assert_eq!(w, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(words(3, 0), vec![Vec::<u64>::new()]);
    }
}
