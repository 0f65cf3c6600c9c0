// quick profiling driver: single GM run on r25_1
fn main() {
    let text = std::fs::read_to_string("data/r25_1.txt").unwrap();
    let inst = vrptw_cg::instance::parse_solomon(&text, 10).unwrap().normalize();
    let cfg = vrptw_cg::report::SolveConfig {
        mode: vrptw_cg::report::Mode::Gm,
        la_neighbors: 6,
        ..Default::default()
    };
    let r = vrptw_cg::master::run_gm(&inst, &cfg).unwrap();
    println!("exact={}ms family={}ms", r.pricing_time_exact_ms, r.pricing_time_family_ms.unwrap());
}
