use coopmsr::cluster::Cluster;
use coopmsr::msrcode::{encode, is_codeword, recover_erasures, DEFAULT_PRIME};
use coopmsr::repair::{check_optimal, repair_pair, MessageKind};
use coopmsr::{CodeParams, Fe, Field, IndexSpace};
use proptest::prelude::*;

const P: u64 = 65537;

fn field() -> Field {
    Field::new(P).unwrap()
}

proptest! {
    #[test]
    fn field_axioms(a in 0..P, b in 0..P, c in 0..P) {
        let f = field();
        let (x, y, z) = (f.elem(a), f.elem(b), f.elem(c));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        prop_assert_eq!(f.sub(f.add(x, y), y), x);
        prop_assert_eq!(f.mul(x, y).value() as u64, a * b % P);
        if a != 0 {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), Fe::ONE);
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication(a in 0..P, e in 0u64..40) {
        let f = field();
        let x = f.elem(a);
        let want = (0..e).fold(Fe::ONE, |acc, _| f.mul(acc, x));
        prop_assert_eq!(f.pow(x, e), want);
    }

    #[test]
    fn digits_round_trip(r in 2u64..5, m in 1usize..8, seed in any::<u64>(), i in 1usize..8, v in 0u64..5) {
        let space = IndexSpace::new(r, m, 1).unwrap();
        let a = seed % space.ell();
        let d = space.expand(a).unwrap();
        prop_assert_eq!(space.compress(&d).unwrap(), a);
        let i = (i - 1) % m + 1;
        let v = v % r;
        let b = space.substitute(a, i, v).unwrap();
        prop_assert_eq!(space.digit(b, i), v);
        for pos in (1..=m).filter(|&p| p != i) {
            prop_assert_eq!(space.digit(b, pos), d.get(pos));
        }
        // axis rank enumerates A(i, a_i) in order
        let members: Vec<u64> = space.axis_set(i, space.digit(a, i)).unwrap().collect();
        prop_assert_eq!(members[space.axis_rank(a, i) as usize], a);
    }
}

fn code_strategy() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((4, 2)), Just((5, 3)), Just((3, 1))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_r_erasures_decode((n, k) in code_strategy(), seed in any::<u64>(), mask in any::<u64>()) {
        let p = CodeParams::new(n, k, DEFAULT_PRIME).unwrap();
        let ell = p.ell() as usize;
        let data: Vec<Vec<Fe>> = (0..k)
            .map(|j| (0..ell).map(|b| p.field().elem(seed.wrapping_mul(j as u64 * 131 + b as u64 + 7) % P)).collect())
            .collect();
        let cw = encode(&p, &data).unwrap();
        prop_assert!(is_codeword(&p, &cw).unwrap());
        let mut erased: Vec<usize> = (1..=n).filter(|j| mask >> j & 1 == 1).collect();
        erased.truncate(p.r());
        let mut damaged = cw.clone();
        for &j in &erased {
            damaged.node_mut(j).iter_mut().for_each(|x| *x = Fe::ZERO);
        }
        recover_erasures(&p, &mut damaged, &erased).unwrap();
        prop_assert_eq!(damaged, cw);
    }

    #[test]
    fn repair_restores_any_pair((n, k) in code_strategy(), seed in any::<u64>(), pick in any::<(usize, usize)>()) {
        let p = CodeParams::new(n, k, DEFAULT_PRIME).unwrap();
        let ell = p.ell() as usize;
        let data: Vec<Vec<Fe>> = (0..k)
            .map(|j| (0..ell).map(|b| p.field().elem(seed.rotate_left((j * 7 + b) as u32 % 64) % P)).collect())
            .collect();
        let cw = encode(&p, &data).unwrap();
        let i1 = pick.0 % n + 1;
        let mut i2 = pick.1 % n + 1;
        if i2 == i1 {
            i2 = i1 % n + 1;
        }
        let (i1, i2) = (i1.min(i2), i1.max(i2));
        let out = repair_pair(&p, &cw, i1, i2).unwrap();
        prop_assert_eq!(&out.first[..], cw.node(i1));
        prop_assert_eq!(&out.second[..], cw.node(i2));
        prop_assert!(check_optimal(&out.transcript, &p).optimal);
    }

    #[test]
    fn cluster_round_trip(bytes in proptest::collection::vec(any::<u8>(), 0..400), pick in 0usize..10) {
        let p = CodeParams::new(5, 3, DEFAULT_PRIME).unwrap();
        let mut c = Cluster::ingest(&p, &bytes).unwrap();
        let pairs: Vec<(usize, usize)> = (1..=5).flat_map(|a| (a + 1..=5).map(move |b| (a, b))).collect();
        let (i1, i2) = pairs[pick];
        c.fail(i1, i2).unwrap();
        prop_assert_eq!(c.read_back().unwrap(), bytes.clone());
        let rep = c.repair().unwrap();
        prop_assert!(rep.optimal);
        prop_assert!(c.syndrome_ok().unwrap());
        prop_assert_eq!(c.ledger_total(MessageKind::Download) + c.ledger_total(MessageKind::Collab), rep.total_gamma);
        prop_assert_eq!(c.read_back().unwrap(), bytes);
    }
}
