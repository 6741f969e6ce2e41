//! Scenarios bundled with the binary.

pub struct Example {
    pub name: &'static str,
    pub topic: &'static str,
    pub text: &'static str,
}

macro_rules! example {
    ($name:literal, $topic:literal) => {
        Example {
            name: $name,
            topic: $topic,
            text: include_str!(concat!("../scenarios/", $name, ".json")),
        }
    };
}

pub const EXAMPLES: &[Example] = &[
    example!("gauss-identity", "Gauss decomposition"),
    example!("gauss-three-block", "Gauss decomposition"),
    example!("flow-commuting", "multidimensional linear flows"),
    example!("riccati-tanh", "Riccati equation, scalar oracle"),
    example!("riccati-matrix", "Riccati equation, direct vs linearized"),
    example!("riccati-md", "multidimensional Riccati-type system"),
    example!("b-zero", "closed form, block-lower coefficients"),
    example!("c-equals-b", "closed form, symmetric off-diagonal coefficients"),
    example!("constant-bc", "closed form, constant off-diagonal coefficients"),
    example!("three-block-nilpotent", "closed form, three-block nilpotent coefficients"),
    example!("md-nilpotent", "closed form, multidimensional nilpotent coefficients"),
    example!("toda-liouville", "Toda system, Liouville sector"),
    example!("toda-nonabelian", "Toda system, maximally nonabelian family"),
    example!("wznw-liouville", "WZNW reconstruction"),
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}
