//! Solutions shipped inside the binary.

pub struct Bundled {
    pub id: &'static str,
    pub text: &'static str,
    /// `false` for the counterexamples kept to exercise rejection paths.
    pub solution: bool,
    pub summary: &'static str,
}

pub const BUNDLED: &[Bundled] = &[
    Bundled {
        id: "a3-wdvv",
        text: include_str!("../bundles/a3-wdvv.sol"),
        solution: true,
        summary: "quintic WDVV prepotential in 3 variables, antidiagonal metric",
    },
    Bundled {
        id: "algebra-n2",
        text: include_str!("../bundles/algebra-n2.sol"),
        solution: true,
        summary: "quadratic K from the algebra with unit e1 and e2^2 = 0",
    },
    Bundled {
        id: "bad-input",
        text: include_str!("../bundles/bad-input.sol"),
        solution: true,
        summary: "OAE solution failing the Backlund symmetry condition",
    },
    Bundled {
        id: "bad-oae",
        text: include_str!("../bundles/bad-oae.sol"),
        solution: false,
        summary: "quadratic K that violates OAE",
    },
    Bundled {
        id: "bad-wdvv",
        text: include_str!("../bundles/bad-wdvv.sol"),
        solution: false,
        summary: "F = x1*x2*x3 + x1^3 with identity metric, violates WDVV",
    },
    Bundled {
        id: "commuting-cubic",
        text: include_str!("../bundles/commuting-cubic.sol"),
        solution: true,
        summary: "cubic prepotential whose Hessian gradient integrates",
    },
    Bundled {
        id: "linear-n3",
        text: include_str!("../bundles/linear-n3.sol"),
        solution: true,
        summary: "linear K in 3 variables",
    },
];

pub fn lookup(id: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.id == id)
}

/// The four bundled solutions the verification suite runs on.
pub fn solutions() -> impl Iterator<Item = &'static Bundled> {
    ["linear-n3", "algebra-n2", "a3-wdvv", "commuting-cubic"]
        .into_iter()
        .filter_map(lookup)
}
