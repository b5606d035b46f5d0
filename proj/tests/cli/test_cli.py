#!/usr/bin/env python3
"""End-to-end checks of the command-line interface.

Run with REUTIL_BIN pointing at the built binary and REUTIL_CONFIGS at the
sample configuration directory.
"""

import json
import os
import subprocess
import sys
import tempfile

BIN = os.environ["REUTIL_BIN"]
CONFIGS = os.environ["REUTIL_CONFIGS"]

failures = []


def check(name, ok, detail=""):
    status = "ok" if ok else "FAIL"
    print(f"  [{status}] {name} {detail}")
    if not ok:
        failures.append(name)


def run(*args, expect_code=0):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True)
    if proc.returncode != expect_code:
        check(f"exit code for {' '.join(args[:2])}", False,
              f"(got {proc.returncode}, want {expect_code}; stderr: {proc.stderr.strip()[:200]})")
    return proc


def cfg(name):
    return os.path.join(CONFIGS, name)


def main():
    # Optimal policy at the two illustrated loss-aversion levels.
    out = run("policy", "--config", cfg("scaled_tk_lambda25.json")).stdout
    rep = json.loads(out)
    pol = rep["policy"]
    check("lambda=2.5 regime", pol["regime"] == "two_point")
    check("lambda=2.5 theta", abs(pol["theta"] - 0.183) < 0.002, f"theta={pol['theta']:.5f}")
    check("lambda=2.5 Theta", abs(pol["theta_big"] - 1.037) < 0.002)
    check("pasting residuals small",
          abs(rep["smooth_pasting"]["upper"]) < 1e-6
          and abs(rep["smooth_pasting"]["lower"]) < 1e-6)

    out = run("policy", "--config", cfg("scaled_tk_lambda256.json")).stdout
    rep = json.loads(out)
    check("lambda=2.56 regime", rep["policy"]["regime"] == "gains_only")
    check("lambda=2.56 theta printed as never", rep["policy"]["theta_pct"] == "never")

    # Emitted reports re-parse as configurations.
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
        json.dump(rep["config"], f)
        round_trip = f.name
    run("policy", "--config", round_trip)
    check("report config round-trips", True)
    os.unlink(round_trip)

    # Transversality failure exits 2 with the violation named.
    proc = run("policy", "--config", cfg("scaled_tk_lambda25.json"),
               "--set", "utility.delta=0", expect_code=2)
    check("delta=0 reported", "NONPOSITIVE_DELTA" in proc.stdout + proc.stderr)

    # Threshold statistics of the fitted rule.
    rep = json.loads(run("stats", "--config", cfg("fit_row.json")).stdout)
    check("fit-row E[tau] in days",
          abs(rep["stats"]["mean_duration_days"] - 174.4) < 0.1,
          f"got {rep['stats']['mean_duration_days']:.2f}")
    check("fit-row Q_G", abs(rep["stats"]["q_gain"] - 0.577) < 1e-3)

    # Poisson statistics.
    rep = json.loads(run("poisson", "--config", cfg("poisson_t1.json"),
                         "--set", "poisson.rho=1.94").stdout)
    check("poisson rho=1.94 Q_G", abs(rep["stats"]["q_gain"] - 0.538) < 1e-3)

    # Representative aggregation.
    rep = json.loads(run("aggregate", "--config", cfg("fit_row.json")).stdout)
    check("aggregate O", abs(rep["aggregate"]["odean"]["odean"] - 1.28) < 0.01)
    rep = json.loads(run("aggregate", "--config", cfg("poisson_t1.json")).stdout)
    check("poisson aggregate O = 1", abs(rep["aggregate"]["odean"]["odean"] - 1.0) < 1e-12)

    # Heterogeneous populations.
    rep = json.loads(run("aggregate", "--config", cfg("mix_investors.json")).stdout)
    check("investor mix phi_bar", abs(rep["aggregate"]["phi_gain_bar"] - 0.461) < 0.002)
    rep = json.loads(run("aggregate", "--config", cfg("mix_holdings.json")).stdout)
    check("holdings mix phi_bar", abs(rep["aggregate"]["phi_gain_bar"] - 0.440) < 0.002)

    # Critical loss aversion.
    rep = json.loads(run("lambda-star", "--config", cfg("scaled_tk_lambda25.json")).stdout)
    check("lambda*", abs(rep["critical"]["lambda_star"] - 2.531) < 0.005)

    # Table reproduction in CSV form.
    out = run("table", "t1", "--format", "csv").stdout
    lines = out.strip().splitlines()
    check("t1 header",
          lines[0] == "block,beta,theta_big_pct,theta_pct,q_gain_pct,phi_gain_pct,"
                      "mean_duration_days,pgr_pct,plr_pct,odean")
    fit = next(l for l in lines if l.startswith("fit_odean"))
    check("t1 fit row", "27.7,-22.8,57.7,50.7,174,14.0,10.9,1.28" in fit, fit)
    check("t1 has never rows", any(",never," in l for l in lines))
    scaled_05 = [l for l in lines if l.startswith("scaled_aG0.50_aL0.50")]
    check("t1 scaled alpha=0.5 pattern", len(scaled_05) == 2 and
          all(float(l.split(",")[2]) < 6.0 for l in scaled_05), str(scaled_05))
    pgr = float(scaled_05[0].split(",")[7])
    plr = float(scaled_05[0].split(",")[8])
    check("t1 PGR >> PLR in the alpha=0.5 block", pgr > 5 * plr)

    out = run("table", "t2", "--format", "csv").stdout
    check("t2 aL=8 beta=0 row",
          any(l.startswith("modified_aG0.50_aL8.0,0.00,27.5,-42.7,77.6,33.3,351")
              for l in out.splitlines()), out.splitlines()[5])

    out = run("table", "t3", "--format", "csv").stdout
    row = next(l for l in out.splitlines()
               if l.startswith("modified_aL8.0_rho1.5,0.00"))
    cols = row.split(",")
    check("t3 investors O", abs(float(cols[9]) - 1.66) < 0.02, row)
    check("t3 holdings O", abs(float(cols[13]) - 1.93) < 0.02, row)
    # Rows whose realization-utility side is gains-only still aggregate; the
    # absent loss point enters the trade-weighted average at zero.
    row = next(l for l in out.splitlines()
               if l.startswith("modified_aL2.0_rho1.5,0.30"))
    cols = row.split(",")
    check("t3 gains-only mixture theta_bar", abs(float(cols[3]) + 19.7) < 0.1, row)
    check("t3 gains-only mixture O", abs(float(cols[9]) - 1.23) < 0.02, row)

    # Simulation: byte-identical reruns, small z-scores, ledger written.
    with tempfile.TemporaryDirectory() as tmp:
        ledger = os.path.join(tmp, "ledger.csv")
        args = ("simulate", "--config", cfg("fit_row.json"),
                "--set", "sim.n_episodes=20000", "--ledger", ledger)
        out1 = run(*args).stdout
        out2 = run(*args).stdout
        check("simulate is deterministic", out1 == out2)
        rep = json.loads(out1)
        zs = [abs(row["z"]) for row in rep["comparison"]]
        check("simulate |z| < 3", max(zs) < 3.0, f"max |z| = {max(zs):.2f}")
        with open(ledger) as f:
            header = f.readline().strip()
            n_rows = sum(1 for _ in f)
        check("ledger header", header == "stream,t_start,t_end,x_exit,is_gain")
        check("ledger rows", n_rows == 20000, f"{n_rows}")

        out3 = run("simulate", "--config", cfg("fit_row.json"),
                   "--set", "sim.n_episodes=20000", "--seed", "9").stdout
        rep3 = json.loads(out3)
        check("different seed changes estimates",
              rep3["comparison"][0]["estimate"] != rep["comparison"][0]["estimate"])
        zs3 = [abs(row["z"]) for row in rep3["comparison"]]
        check("seed 9 |z| < 3", max(zs3) < 3.0)

    # Account-level simulation (mixed holdings) against the closed forms.
    rep = json.loads(run("simulate", "--config", cfg("mix_holdings.json")).stdout)
    zs = [abs(row["z"]) for row in rep["comparison"]]
    check("account simulate |z| < 3", max(zs) < 3.0, f"max |z| = {max(zs):.2f}")
    check("account simulate counted sales", rep["n_sales"] > 1000)

    # CSV scalar rendering and --out.
    with tempfile.TemporaryDirectory() as tmp:
        out_path = os.path.join(tmp, "report.csv")
        run("stats", "--config", cfg("fit_row.json"), "--format", "csv",
            "--out", out_path)
        with open(out_path) as f:
            text = f.read()
        check("csv scalar output", text.startswith("key,value") and "stats.q_gain" in text)

    # Config diagnostics.
    with tempfile.TemporaryDirectory() as tmp:
        bad = os.path.join(tmp, "bad.json")
        with open(bad, "w") as f:
            f.write('{"asset": {"mu": 0.09, "sigma": 0.3, "muu": 1}}')
        proc = run("stats", "--config", bad, expect_code=1)
        check("unknown key path reported", "asset.muu" in proc.stderr, proc.stderr.strip())
        with open(bad, "w") as f:
            f.write('{"asset": {"mu": 0.09,, }}')
        proc = run("stats", "--config", bad, expect_code=1)
        check("syntax error has line info", "CONFIG_PARSE" in proc.stderr
              and ":1:" in proc.stderr, proc.stderr.strip())

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
