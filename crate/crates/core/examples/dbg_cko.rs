use kocheck::expr::log_power;
use kocheck::quad::classical_ko;

fn main() {
    let g = log_power(1.0, 3.0);
    let v = classical_ko(&g, 1e-3);
    eprintln!("status: {:?}, note: {}", v.status, v.evidence.note);
    for (si, side) in v.evidence.sides.iter().enumerate() {
        eprintln!("side {si}: outcome {:?}", side.outcome);
        let n = side.blocks.len();
        eprintln!("  blocks: {n}");
        for b in side.blocks.iter().rev().take(12).collect::<Vec<_>>().iter().rev() {
            eprintln!("  x=[{:.2},{:.2}] b={:.6e} ratio={:?}", b.lo, b.hi, b.integral, b.ratio);
        }
    }
}
