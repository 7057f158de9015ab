use beurling_core::grid::{beurling_grid, GridField};
use beurling_core::Complex64;
use proptest::prelude::*;

fn header(n: u32, l: f64) -> Vec<u8> {
    let mut h = b"BGF1".to_vec();
    h.extend_from_slice(&n.to_le_bytes());
    h.extend_from_slice(&l.to_le_bytes());
    h.extend_from_slice(&[0, 0, 0, 0]);
    h
}

#[test]
fn byte_layout_is_row_major_little_endian() {
    let f = GridField::from_fn(16, 2.5, |z| Complex64::new(z.re, 10.0 * z.im)).unwrap();
    let mut bytes = Vec::new();
    f.write_to(&mut bytes).unwrap();
    assert_eq!(bytes.len(), 20 + 16 * 16 * 16);
    assert_eq!(&bytes[..20], header(16, 2.5).as_slice());
    // sample (i, j) = (3, 5) sits at position 5 * 16 + 3
    let at = 20 + 16 * (5 * 16 + 3);
    let re = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let im = f64::from_le_bytes(bytes[at + 8..at + 16].try_into().unwrap());
    assert_eq!(Complex64::new(re, im), f.get(3, 5));
    assert_eq!(f.node(3, 5).re, re);
}

#[test]
fn malformed_headers_are_rejected() {
    let body = vec![0u8; 16 * 16 * 16];
    let with = |h: Vec<u8>| [h, body.clone()].concat();
    assert!(GridField::read_from(with(header(16, 1.0)).as_slice()).is_ok());

    let mut bad_magic = header(16, 1.0);
    bad_magic[3] = b'2';
    let mut bad_layout = header(16, 1.0);
    bad_layout[16] = 1;
    let mut bad_pad = header(16, 1.0);
    bad_pad[19] = 7;
    for h in [bad_magic, bad_layout, bad_pad, header(24, 1.0), header(8, 1.0), header(16, -1.0)] {
        assert!(GridField::read_from(with(h).as_slice()).is_err());
    }
    let truncated = with(header(16, 1.0));
    assert!(GridField::read_from(&truncated[..truncated.len() - 1]).is_err());
}

#[test]
fn saved_transform_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let f = GridField::from_fn(64, 4.0, |z| Complex64::new((-z.norm_sqr()).exp(), 0.0)).unwrap();
    let b = beurling_grid(1, &f);
    let path = dir.path().join("b.bgf");
    b.save(&path).unwrap();
    assert_eq!(GridField::load(&path).unwrap(), b);
}

proptest! {
    #[test]
    fn round_trip(log_n in 4u32..7, l in 0.1f64..100.0, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let samples: Vec<Complex64> = (0..n * n)
            .map(|i| {
                let x = (i as u64).wrapping_mul(seed | 1) as f64;
                Complex64::new(x.sin(), (x * 0.5).cos())
            })
            .collect();
        let f = GridField::new(n, l, samples).unwrap();
        let mut bytes = Vec::new();
        f.write_to(&mut bytes).unwrap();
        prop_assert_eq!(GridField::read_from(bytes.as_slice()).unwrap(), f);
    }
}
