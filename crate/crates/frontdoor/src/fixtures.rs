//! Built-in graph fixtures used by the experiment drivers and the test suite.
//!
//! Each fixture is a small semi-Markovian model with labeled treatment,
//! outcome, and children roles. They cover the qualitatively distinct cases:
//! models where the children set is a classical front-door set, models where it
//! is not but a generalized front-door witness exists, a model where only
//! identifiability (no shared formula) holds, a model violating the
//! confounding assumption, and six ten-node models drawn from the random
//! ensemble at `p = 10, d = 2, q = 1` that all admit a witness.

use crate::graph::{GraphError, Smcm};

/// Names of all built-in fixtures, in canonical order.
pub const FIXTURE_NAMES: [&str; 14] = [
    "gtoy", "gtoy1", "gtoy2", "gtoy3", "fig3left", "fig3right", "fig4a", "fig6", "rnd1", "rnd2",
    "rnd3", "rnd4", "rnd5", "rnd6",
];

/// Looks up a fixture by name.
pub fn by_name(name: &str) -> Option<Smcm> {
    let text = match name {
        "gtoy" => GTOY,
        "gtoy1" => GTOY1,
        "gtoy2" => GTOY2,
        "gtoy3" => GTOY3,
        "fig3left" => FIG3LEFT,
        "fig3right" => FIG3RIGHT,
        "fig4a" => FIG4A,
        "fig6" => FIG6,
        "rnd1" => RND1,
        "rnd2" => RND2,
        "rnd3" => RND3,
        "rnd4" => RND4,
        "rnd5" => RND5,
        "rnd6" => RND6,
        _ => return None,
    };
    Some(parse(text))
}

fn parse(text: &str) -> Smcm {
    text.parse()
        .unwrap_or_else(|e: GraphError| panic!("invalid builtin fixture: {e}"))
}

/// Seven-node model whose children set is not a front-door set: the back-door
/// path B <- Z_i -> Y is not blocked by T alone, but Z = {Z_i, Z_o} is a
/// generalized front-door witness.
/// Nodes: 0 x1, 1 x2, 2 t, 3 b, 4 z_i, 5 z_o, 6 y.
pub const GTOY: &str = "\
smcm 7
d 0 2
d 2 3
d 3 5
d 4 3
d 4 6
d 5 6
b 0 1
b 1 2
b 1 3
b 1 6
b 2 6
role t 2
role y 6
role b 3
";

/// `gtoy` plus x1 -> x2, z_i <-> y, z_i -> z_o.
pub const GTOY1: &str = "\
smcm 7
d 0 1
d 0 2
d 2 3
d 3 5
d 4 3
d 4 5
d 4 6
d 5 6
b 0 1
b 1 2
b 1 3
b 1 6
b 2 6
b 4 6
role t 2
role y 6
role b 3
";

/// `gtoy` plus z_i <-> b, z_i -> z_o, z_i -> x2.
pub const GTOY2: &str = "\
smcm 7
d 0 2
d 2 3
d 3 5
d 4 1
d 4 3
d 4 5
d 4 6
d 5 6
b 0 1
b 1 2
b 1 3
b 1 6
b 2 6
b 3 4
role t 2
role y 6
role b 3
";

/// `gtoy` plus x1 -> y, z_i <-> z_o, z_i -> z_o.
pub const GTOY3: &str = "\
smcm 7
d 0 2
d 0 6
d 2 3
d 3 5
d 4 3
d 4 5
d 4 6
d 5 6
b 0 1
b 1 2
b 1 3
b 1 6
b 2 6
b 4 5
role t 2
role y 6
role b 3
";

/// Five-node model where identifiability holds (B _|_ Y | T, {Z1, Z2}) but the
/// plain front-door formula is biased; the correct estimand is the two-stage
/// sequential adjustment. Nodes: 0 z1, 1 t, 2 b, 3 z2, 4 y.
pub const FIG3LEFT: &str = "\
smcm 5
d 0 1
d 0 2
d 1 2
d 2 3
d 3 4
b 1 4
role t 1
role y 4
role b 2
";

/// Four-node model where Z2 is a classical front-door set.
/// Nodes: 0 t, 1 b, 2 z2, 3 y.
pub const FIG3RIGHT: &str = "\
smcm 4
d 0 1
d 1 2
d 2 3
b 0 3
role t 0
role y 3
role b 1
";

/// Five-node model admitting a witness while its Markov equivalence class does
/// not identify the effect. Nodes: 0 t, 1 b, 2 z_i, 3 z_o, 4 y.
pub const FIG4A: &str = "\
smcm 5
d 0 1
d 1 3
d 2 1
d 2 3
d 3 4
b 0 4
b 2 4
role t 0
role y 4
role b 1
";

/// Variant of `fig4a` with T <-> B and a direct T -> Y edge; the declared
/// children set {1} is wrong there (the only child of T is Y), so role
/// attachment must be rejected. Shipped without roles.
pub const FIG4B: &str = "\
smcm 5
d 0 4
d 1 3
d 2 1
d 2 3
d 3 4
b 0 1
b 2 4
";

/// Five-node model where the confounding assumption fails: no bidirected edge
/// between T and Y. A witness Z = {z_o} passes the independence scan, yet the
/// adjustment formulas are biased (the true effect needs the back-door set
/// {a}). Nodes: 0 a, 1 t, 2 b, 3 z_o, 4 y.
pub const FIG6: &str = "\
smcm 5
d 0 1
d 0 2
d 1 2
d 2 3
d 3 4
role t 1
role y 4
role b 2
";

/// Ten-node ensemble draw (p=10, d=2, q=1). Witness: Z = {0, 7}, Z_i = {0},
/// Z_o = {7}. Nodes 0..8 in causal order, 9 is the outcome.
pub const RND1: &str = "\
smcm 10
d 0 4
d 0 5
d 0 8
d 1 3
d 1 8
d 2 3
d 2 5
d 3 4
d 3 6
d 3 7
d 5 6
d 7 9
b 0 5
b 0 9
b 1 9
b 2 3
b 4 9
b 6 8
role t 1
role y 9
role b 3 8
";

/// Ten-node ensemble draw. Witness: Z = {0, 3, 5, 7}, Z_i = {0, 3, 7}, Z_o = {5}.
pub const RND2: &str = "\
smcm 10
d 0 1
d 0 3
d 0 5
d 0 6
d 1 6
d 2 4
d 2 6
d 3 6
d 3 8
d 3 9
d 4 5
d 4 6
d 5 8
d 5 9
d 7 8
d 8 9
b 2 8
b 2 9
b 4 7
role t 2
role y 9
role b 4 6
";

/// Ten-node ensemble draw. Witness: Z = {2}, Z_i = {}, Z_o = {2}.
pub const RND3: &str = "\
smcm 10
d 0 1
d 0 5
d 1 2
d 1 7
d 2 9
d 3 4
d 3 6
d 4 6
d 4 8
d 4 9
d 5 6
b 0 9
b 1 6
b 3 4
b 7 8
role t 0
role y 9
role b 1 5
";

/// Ten-node ensemble draw. Witness: Z = {5, 6}, Z_i = {5}, Z_o = {6}.
pub const RND4: &str = "\
smcm 10
d 0 1
d 0 2
d 0 7
d 0 8
d 1 4
d 1 7
d 2 4
d 2 6
d 3 4
d 3 8
d 4 7
d 5 8
d 5 9
d 6 9
b 0 9
b 1 7
b 1 8
b 2 4
role t 0
role y 9
role b 1 2 7 8
";

/// Ten-node ensemble draw. Witness: Z = {1, 7}, Z_i = {1}, Z_o = {7}.
pub const RND5: &str = "\
smcm 10
d 0 2
d 0 4
d 1 3
d 1 4
d 1 6
d 1 8
d 2 4
d 2 5
d 2 6
d 4 7
d 4 8
d 6 7
d 7 9
b 0 9
b 4 8
b 5 7
role t 0
role y 9
role b 2 4
";

/// Ten-node ensemble draw. Witness: Z = {1, 5}, Z_i = {1}, Z_o = {5}.
pub const RND6: &str = "\
smcm 10
d 0 2
d 0 3
d 0 4
d 1 2
d 1 4
d 1 5
d 1 7
d 1 9
d 2 3
d 2 4
d 3 5
d 3 6
d 4 6
d 5 7
d 5 8
d 5 9
d 6 7
b 0 9
b 1 3
b 3 6
b 5 8
b 6 7
role t 0
role y 9
role b 2 3 4
";
