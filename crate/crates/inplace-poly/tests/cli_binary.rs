use std::process::Command;

fn ipoly(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ipoly")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn mul_prints_product_and_metrics() {
    let (code, out) = ipoly(&["mul", "--f", "1,2,3", "--g", "4,5"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "97;4,13,22,15");
    assert!(lines[1].starts_with("extra_algebraic=0 "));
    assert_eq!(lines[2], "restored=true");
}

#[test]
fn divrem_reports_quotient_and_remainder() {
    let (code, out) = ipoly(&["divrem", "--f", "1,2,3,4,5", "--g", "1,1,1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("q: 97;96,96,5\nr: 97;2,4\n"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(ipoly(&["inv", "--f", "0,1"]).0, 1);
    assert_eq!(ipoly(&["mul", "--f", "1,x", "--g", "1"]).0, 2);
    assert_eq!(ipoly(&["nosuch"]).0, 2);
}

#[test]
fn bench_csv() {
    let (code, out) = ipoly(&["bench", "cumulative-karatsuba", "--sizes", "2^4,32"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "op,n,wall_time_s,extra_algebraic,pointer_depth,base_products");
    assert!(rows[1].starts_with("cumulative-karatsuba,16,"));
    assert!(rows[2].starts_with("cumulative-karatsuba,32,"));
}
