//! Direct substitution checks of the q -> t/q involution on the standard
//! forms, complementing the coefficient-form checker: the substituted series
//! must literally equal the monomial-shifted original on the shrunken box.

use jacform_core::forms::{phi_01, phi_m21};
use jacform_core::rational::rat;
use jacform_core::series::ops::{invert, monomial_mul, mul};
use jacform_core::series::sbasis::to_sbasis;
use jacform_core::series::subst::subst_q_inv_t;
use jacform_core::series::{compare, BoxSpec};

/// `phi_{0,1}(t/q, t) = q^2 t^{-1} phi_{0,1}(q, t)` on the shrunken box:
/// the left side shears the restriction of phi_{0,1} to `n + d >= 0`, the
/// right side remaps the cells of phi_{0,1} above t^0 by `(n, d) ->
/// (n + 2, d - 1)` (the t^0 row has no preimage under the restricted shear).
#[test]
fn phi01_shear_law_via_substitution() {
    let tmax = 12;
    let phi0 = phi_01(tmax);
    let restricted = phi0.restrict_lower(0, -1).unwrap();
    let lhs = subst_q_inv_t(&restricted).unwrap();
    let rhs = jacform_core::series::BiSeries::from_cells(
        tmax - 1,
        phi0.cells()
            .filter(|&(_, d, _)| d >= 1)
            .map(|(n, d, c)| (n + 2, d - 1, c.clone())),
    );
    let cmp = compare(&lhs, &rhs).unwrap();
    assert!(cmp.equal, "first mismatch: {:?}", cmp.first_mismatch);
    assert!(
        cmp.compared_cells >= 50,
        "only {} cells compared",
        cmp.compared_cells
    );
    // and the coefficient-form checker agrees at index 1 (h = 2)
    for lambda in [-1, 1] {
        let v = jacform_core::pt::check_elliptic_law(&phi0, 2, lambda).unwrap();
        assert!(v.pass, "{:?}", v.first_mismatch);
    }
}

/// `1/phi_{-2,1}(t/q, t) = q^{-2} t / phi_{-2,1}(q, t)` as power series; no
/// restriction is needed because every cell of the ascending expansion obeys
/// `n + d >= 1`.
#[test]
fn inverse_phi_shear_law_via_substitution() {
    let tmax = 12;
    let spec = BoxSpec::with_default_window(tmax);
    let inv_phi = to_sbasis(&phi_m21(tmax))
        .unwrap()
        .invert()
        .unwrap()
        .expand_on(spec)
        .unwrap();
    let sheared = subst_q_inv_t(&inv_phi).unwrap();
    let rhs = monomial_mul(&inv_phi, &rat(1), -2, 1).unwrap();
    let cmp = compare(&sheared, &rhs).unwrap();
    assert!(cmp.equal, "first mismatch: {:?}", cmp.first_mismatch);
    assert!(
        cmp.compared_cells >= 50,
        "only {} cells compared",
        cmp.compared_cells
    );
}

/// The same law through the generic inverter on the bivariate side:
/// `invert(phi_{-2,1})` is only possible after normalizing the t^0 slice,
/// which is what the s-basis route does; multiplying back gives 1.
#[test]
fn inverse_phi_is_a_two_sided_inverse() {
    let tmax = 10;
    let spec = BoxSpec::with_default_window(tmax);
    let phi = phi_m21(tmax);
    let inv_phi = to_sbasis(&phi)
        .unwrap()
        .invert()
        .unwrap()
        .expand_on(spec)
        .unwrap();
    let prod = mul(&inv_phi, &phi).unwrap();
    let one = jacform_core::series::BiSeries::one(tmax);
    let cmp = compare(&prod, &one).unwrap();
    assert!(cmp.equal, "first mismatch: {:?}", cmp.first_mismatch);

    // the bivariate inverter rejects the non-monomial t^0 slice directly
    assert!(invert(&phi).is_err());
}
