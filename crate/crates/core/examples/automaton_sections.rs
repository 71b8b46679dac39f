//! Parse a self-similar automaton, act on vertices and inspect sections,
//! activity counts and the weighted activity profile.

use num_rational::BigRational;
use treerep::autom::{activity, apply_vertex, parse_automaton, section, subexp_profile};
use treerep::groups::GroupSpec;
use treerep::tree::Vertex;

const ADDING_MACHINE: &str = "\
degree = 2
t = [1,0] (1, t)
";

fn main() -> treerep::Result<()> {
    let automaton = parse_automaton(ADDING_MACHINE)?;
    println!("adding machine with {} generator", automaton.generator_count());

    let group = GroupSpec::builtin("grigorchuk")?;
    let d = group.degree();
    let b = group.parse_element("b")?;
    let word = group.parse_element("a b a d")?;
    for v in ["000", "111", "0101"] {
        let v = Vertex::parse(v, d)?;
        println!("abad · {v} = {}", apply_vertex(&word, &v));
    }
    let s = section(&word, &Vertex::parse("1", d)?);
    println!("section of abad at 1: {}", group.automaton().format_word(s.word()));

    let ks: Vec<usize> = (0..=6).map(|n| activity(&b, n)).collect::<treerep::Result<_>>()?;
    println!("activity k_n(b), n = 0..6: {ks:?}");

    let gammas = vec![BigRational::new(1.into(), 2.into())];
    let profile = subexp_profile(&b, 8, &gammas)?;
    for row in &profile.rows {
        println!("n = {}  k_n = {}  k_n/2^n = {}", row.level, row.activity, row.weighted[0]);
    }
    Ok(())
}
