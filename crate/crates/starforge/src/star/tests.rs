use super::*;
use crate::kernel::{frac, int};

fn ints(xs: &[i64]) -> Vec<Scalar> {
    xs.iter().map(|&x| int(x)).collect()
}

fn lines012() -> StarPresentation {
    lines(&ints(&[0, 1, 2])).unwrap()
}

fn germ(rows: &[&[i64]]) -> MultiGerm {
    MultiGerm::new(rows.iter().map(|r| TruncSeries::from_ints(r)).collect())
}

#[test]
fn pair_star_shape() {
    let s = congruence_pair(1).unwrap();
    assert_eq!(s.dim(), 1);
    assert_eq!(s.spectrum().unwrap().rows(), &[vec![0, 1], vec![1, 0]]);
    let s = congruence_pair(3).unwrap();
    assert_eq!(s.dim(), 3);
    assert_eq!(s.spectrum().unwrap().rows(), &[vec![0, 3], vec![3, 0]]);
    assert!(s.validate().is_valid());
}

#[test]
fn pair_star_lambda() {
    assert_eq!(
        congruence_pair(2).unwrap().lambda().unwrap(),
        ints(&[1, -1])
    );
}

#[test]
fn adjoining_a_split_element_breaks_agreement() {
    let s = congruence_pair(2).unwrap();
    let mut basis = s.basis();
    basis.push(germ(&[&[1, 0], &[0, 0]]));
    let bad = StarPresentation::new(vec![2, 2], basis).unwrap();
    let report = bad.validate();
    assert!(!report.is_valid());
    assert!(report
        .failures()
        .any(|c| c.name == "coordinates agree at t=0"));
}

#[test]
fn deleting_a_generator_breaks_closure() {
    // images of 1, t, y, t^2, y^2 on the lines y = 0, t, 2t, 3t; t·y is left out
    let basis = vec![
        germ(&[&[1, 0, 0], &[1, 0, 0], &[1, 0, 0], &[1, 0, 0]]),
        germ(&[&[0, 1, 0], &[0, 1, 0], &[0, 1, 0], &[0, 1, 0]]),
        germ(&[&[0, 0, 0], &[0, 1, 0], &[0, 2, 0], &[0, 3, 0]]),
        germ(&[&[0, 0, 1], &[0, 0, 1], &[0, 0, 1], &[0, 0, 1]]),
        germ(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 4], &[0, 0, 9]]),
    ];
    let full = lines(&ints(&[0, 1, 2, 3])).unwrap();
    assert_eq!(basis.len() + 1, full.dim());
    let bad = StarPresentation::new(vec![3; 4], basis).unwrap();
    assert!(bad
        .validate()
        .failures()
        .any(|c| c.name == "multiplicatively closed"));
}

#[test]
fn lines_fixture_invariants() {
    let s = lines012();
    assert_eq!(s.q(), &[2, 2, 2]);
    assert_eq!(s.dim(), 3);
    assert!(s.validate().is_valid());
    let p = s.spectrum().unwrap();
    assert_eq!(p.rows(), &[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
    assert_eq!(s.lambda().unwrap(), ints(&[1, -2, 1]));
    assert_eq!(lines(&ints(&[0, 1])).unwrap(), congruence_pair(1).unwrap());
}

#[test]
fn repeated_slope_is_rejected() {
    assert!(matches!(
        lines(&ints(&[0, 1, 1])),
        Err(Error::DegenerateInput(_))
    ));
}

#[test]
fn membership_examples() {
    let s = lines012();
    assert!(s.membership(&s.pi()).unwrap());
    assert!(s.membership(&germ(&[&[0], &[0, 1], &[0, 2]])).unwrap());
    assert!(!s.membership(&germ(&[&[0, 1], &[0], &[0]])).unwrap());
    // high powers reduce to zero
    assert!(s
        .membership(&germ(&[&[0, 0, 0, 5], &[0, 0, 7], &[1]]))
        .is_ok());
    assert!(s.membership(&germ(&[&[1], &[1]])).is_err());
}

#[test]
fn pair_generators_of_lines() {
    let s = lines012();
    let v31 = s.pair_generator(2, 0).unwrap();
    assert_eq!(
        v31.element,
        MultiGerm::new(vec![
            TruncSeries::from_ints(&[0, 1, 0]),
            TruncSeries::new(vec![int(0), frac(1, 2), int(0)]).unwrap(),
            TruncSeries::zero(3),
        ])
    );
    assert_eq!(v31.constants[1], frac(1, 2));
    let v12 = s.pair_generator(0, 1).unwrap();
    assert_eq!(v12.element, germ(&[&[0, 0, 0], &[0, 1, 0], &[0, 2, 0]]));
}

#[test]
fn pair_generator_of_pair_star() {
    let s = congruence_pair(3).unwrap();
    let v = s.pair_generator(0, 1).unwrap();
    assert_eq!(v.element, germ(&[&[0, 0, 0, 0], &[0, 0, 0, 1]]));
}

#[test]
fn unit_constant_examples() {
    let s = lines012();
    let table = s.unit_constants().unwrap();
    let lambda = s.lambda().unwrap();
    assert_eq!(&lambda[0] / &lambda[1], -table.get(2, 0, 1).clone());
    assert_eq!(table.get(0, 1, 2) * table.get(0, 2, 1), int(1));
    let t2 = congruence_pair(2).unwrap().unit_constants().unwrap();
    assert_eq!(t2.get(0, 1, 1), &int(1));
    assert_eq!(t2.get(0, 1, 0), &int(0));
}

#[test]
fn substar_ideals() {
    let s = lines012();
    let both = s.substar_ideal(&[0, 1]).unwrap();
    assert_eq!(both.base, 2);
    assert_eq!(both.valuations, vec![None, None, Some(2)]);
    for k in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
        let ideal = s.substar_ideal(&others).unwrap();
        for i in 0..3 {
            let expect = if i == k { Some(s.q()[k]) } else { None };
            assert_eq!(ideal.valuations[i], expect);
        }
    }
    let pair = congruence_pair(2).unwrap();
    let ideal = pair.substar_ideal(&[0]).unwrap();
    assert_eq!(ideal.generator, germ(&[&[0, 0, 0], &[0, 0, 1]]));
    assert!(s.substar_ideal(&[0, 1, 2]).is_err());
    assert!(s.substar_ideal(&[]).is_err());
}

#[test]
fn connectors() {
    let pair = congruence_pair(3).unwrap();
    let psi = pair.connector(1).unwrap();
    let f = TruncSeries::from_ints(&[4, 5, 6]);
    assert_eq!(psi.apply(std::slice::from_ref(&f)).unwrap(), f);

    let s = lines012();
    let psi3 = s.connector(2).unwrap();
    assert!(psi3.checks.iter().all(|c| c.passed));
    let y = psi3
        .apply(&[
            TruncSeries::from_ints(&[0, 0]),
            TruncSeries::from_ints(&[0, 1]),
        ])
        .unwrap();
    assert_eq!(y, TruncSeries::from_ints(&[0, 2]));
    assert_eq!(psi3.kernel_dim, 1);
}

#[test]
fn fibers_and_embedding_dimension() {
    for p in 1..4 {
        let f = congruence_pair(p).unwrap().fiber_algebra().unwrap();
        assert_eq!(f.dim, 2);
        assert!(f.oblate);
    }
    let s = lines012();
    let f = s.fiber_algebra().unwrap();
    assert!(f.oblate);
    assert_eq!(f.nilpotency_index, Some(3));
    assert_eq!(s.embedding_dimension().unwrap(), 2);
    assert_eq!(
        congruence_pair(1).unwrap().embedding_dimension().unwrap(),
        2
    );

    let init = initial(3).unwrap();
    assert!(init.validate().is_valid());
    assert_eq!(init.embedding_dimension().unwrap(), 3);
    assert!(!init.fiber_algebra().unwrap().oblate);
}

#[test]
fn curves_with_higher_contact() {
    // y = 0, y = t^2, y = t: contacts p_12 = 2, p_13 = p_23 = 1
    let s = curves(&[
        TruncSeries::from_ints(&[0]),
        TruncSeries::from_ints(&[0, 0, 1]),
        TruncSeries::from_ints(&[0, 1]),
    ])
    .unwrap();
    assert_eq!(s.q(), &[3, 3, 2]);
    assert!(s.validate().is_valid());
    assert_eq!(
        s.spectrum().unwrap().rows(),
        &[vec![0, 2, 1], vec![2, 0, 1], vec![1, 1, 0]]
    );
    assert_eq!(s.dim(), s.spectrum().unwrap().upper_sum());
    assert!(s.fiber_algebra().unwrap().oblate);
    s.unit_constants().unwrap();
}

#[test]
fn restriction_to_a_pair() {
    let s = lines012();
    assert_eq!(s.restrict(&[0, 2]).unwrap(), congruence_pair(1).unwrap());
}
