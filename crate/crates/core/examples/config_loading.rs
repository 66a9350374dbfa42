//! Building solution sets from JSON descriptors.

use starflow::systems::SystemConfig;

fn main() -> starflow::Result<()> {
    let texts = [
        r#"{"type": "riccati", "a": -1.0}"#,
        r#"{"type": "inclusion-interval", "lo": 0.5, "hi": 1.0}"#,
        r#"{"type": "ode", "coefficients": [0.0, -1.0]}"#,
        r#"{"type": "finite-aut", "n": 3}"#,
    ];
    for text in texts {
        let cfg = SystemConfig::parse(text)?;
        let s = cfg.build()?;
        println!("{:<40} -> {} ({} sample maps)", text, s.descriptor(), s.sample(3, 0).len());
    }
    match SystemConfig::parse(r#"{"type": "riccati"}"#) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
