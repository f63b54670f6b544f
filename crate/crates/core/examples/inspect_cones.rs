//! Structure constants of the preset cones and of a cone loaded from JSON.

use conewishart::cone::{preset, ConeSpec};

fn main() -> conewishart::Result<()> {
    for name in ["sym(3)", "vinberg", "dual_vinberg", "lorentz(2)"] {
        let cone = preset(name)?;
        println!("{name}: partition {:?}, dim {}", cone.partition(), cone.dim());
        println!("  coordinates {:?}", cone.coordinate_names());
        for i in 0..cone.rank() {
            println!("  m({}) = {:?}", i + 1, cone.m_vector(i));
        }
        println!("  p = {:?}, d = {:?}", cone.p_full(), cone.d_vector());
    }

    // A cone given as JSON: the Vinberg cone written out by hand.
    let text = r#"{
        "name": "vinberg (json)",
        "partition": [2, 1, 1],
        "blocks": [
            {"l": 2, "k": 1, "basis": [[[0.7071067811865476, 0.7071067811865476]]]},
            {"l": 3, "k": 1, "basis": [[[0.7071067811865476, -0.7071067811865476]]]}
        ]
    }"#;
    let cone = ConeSpec::from_json(text)?.build()?;
    for check in cone.axiom_report() {
        println!("{}: {} ({:.1e})", check.rule, check.passed, check.worst_residual);
    }
    Ok(())
}
