use legendrian_dga::algebra::{GenKind, Letter, Renderer};
use legendrian_dga::diagram::{Crossing, Diagram};
use legendrian_dga::differential::Dga;
use legendrian_dga::disks::SearchBudget;
use legendrian_dga::realizability;
use std::collections::BTreeMap;

fn build(which: &str, p: i64, n: i64, m: i64) -> Diagram {
    let signs = [(1u32, -1i8), (2, 1), (3, -1), (4, 1), (5, -1)];
    let anchors = [(1u32, 1u8), (2, 0), (3, 1), (4, 0), (5, 1)];
    let pluses = [(1u32, 1u8), (2, 0), (3, 1), (4, 1), (5, 0)];
    let crossings: Vec<Crossing> = (0..5)
        .map(|i| Crossing {
            id: signs[i].0,
            sign: signs[i].1,
            plus_pair: pluses[i].1,
            anchor: anchors[i].1,
        })
        .collect();
    let (traversal, defects) = match which {
        "l1" => (
            vec![1, 4, 4, 2, 3, 3, 5, 5, 2, 1],
            vec![0, m + n - p, 0, 0, -m, 0, -n],
        ),
        "l2" => (
            vec![1, 4, 4, 2, 5, 5, 3, 3, 2, 1],
            vec![0, m + n - p, 0, 0, 0, -m, -n],
        ),
        other => panic!("unknown fixture {other}"),
    };
    Diagram::build(
        0,
        -p,
        traversal,
        crossings,
        1,
        BTreeMap::new(),
        Vec::new(),
        defects,
    )
    .unwrap()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("l1");
    let d = build(which, 8, 3, 3);
    println!("validate: {:?}", d.validate());
    println!(
        "realizable: {:?}",
        realizability::check(&d, false).unwrap().is_feasible()
    );
    let k = 2;
    let dga = Dga::new(&d, k, &SearchBudget::for_truncation(k)).unwrap();
    let r = Renderer { short_names: false };
    for kind in [GenKind::A, GenKind::B] {
        for site in 1..=5u32 {
            let l = Letter::new(kind, site);
            let g = dga.differential_of(l).unwrap();
            let low: Vec<String> = g
                .total
                .low_energy_words()
                .iter()
                .map(|w| {
                    if w.is_empty() {
                        "1".to_string()
                    } else {
                        w.iter().map(|x| r.letter(*x)).collect::<Vec<_>>().join(" ")
                    }
                })
                .collect();
            println!("d0({}) = {}", r.letter(l), if low.is_empty() { "0".into() } else { low.join(" + ") });
        }
    }
    if args.iter().any(|a| a == "dump") {
        dump_differentials(&dga, &r);
    }
    let report = dga.verify();
    println!("d2 ok: {}", report.d_squared.values().all(|&b| b));
    if !report.failures.is_empty() {
        for f in report.failures.iter().take(8) {
            println!("  FAIL {f}");
        }
    }
    println!("incomplete: {}", dga.incomplete);
}

#[allow(dead_code)]
fn dump_differentials(dga: &Dga, r: &Renderer) {
    for g in &dga.gens {
        println!("d({}) = {}", r.letter(g.letter), r.element(&g.total));
    }
}
