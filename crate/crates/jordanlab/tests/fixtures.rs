use jordanlab::algebra::{AlgebraJson, JordanAlgebra};
use jordanlab::json::to_canonical_string;
use jordanlab::numerics::{max_abs, random_vector, rng_from_seed};
use jordanlab::zoo::{albert_algebra, albert_product_oracle};
use sha2::{Digest, Sha256};

const ALBERT_FIXTURE: &[u8] = include_bytes!("../fixtures/albert27.json");
const ALBERT_SHA256: &str = "4875a47c73b7f8933b41b2939e933ecff6df8d293c11c56d20de45604d566e2b";

#[test]
fn albert_fixture_matches_regenerated_bytes() {
    let (alg, _) = albert_algebra().unwrap();
    let text = to_canonical_string(&alg.to_json()).unwrap() + "\n";
    assert_eq!(text.as_bytes(), ALBERT_FIXTURE);
    let hex: String = Sha256::digest(ALBERT_FIXTURE).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, ALBERT_SHA256);
}

#[test]
fn albert_fixture_agrees_with_octonion_matrix_products() {
    let parsed: AlgebraJson = serde_json::from_slice(ALBERT_FIXTURE).unwrap();
    let alg = JordanAlgebra::from_json(&parsed).unwrap();
    assert_eq!(alg.dim(), 27);
    let mut rng = rng_from_seed(27);
    for _ in 0..10 {
        let x = random_vector(&mut rng, 27, 1.0);
        let y = random_vector(&mut rng, 27, 1.0);
        assert!(max_abs((alg.product(&x, &y) - albert_product_oracle(&x, &y)).iter()) < 1e-12);
    }
}
