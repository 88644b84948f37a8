#!/usr/bin/env python3
"""Run every inequality certificate and write one JSON report."""

import argparse
import json
import sys
import time

from negadep import lemmas


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="default", help="'default', 'quick', or key=value overrides")
    ap.add_argument("--out", default="certificates.json")
    args = ap.parse_args()

    grid = lemmas.GridSpec.parse(args.grid)
    certs = []
    for name in lemmas.LEMMA_IDS:
        t0 = time.perf_counter()
        cert = lemmas.run_lemma(name, grid)
        certs.append(cert)
        status = "PASS" if cert.passed else "FAIL"
        print(f"{name:16s} {status}  {cert.checked:>10} checks  {time.perf_counter() - t0:6.1f}s")

    printed = next(c for c in certs if c.lemma == "G_propositions").notes["small_m_printed_bound"]
    print(f"printed (b-1)/b bound for m < |J|: {printed['violations']} violations in {printed['checked']} points")

    with open(args.out, "w") as fh:
        json.dump({"grid": grid.to_json(), "certificates": [c.to_json() for c in certs]}, fh, indent=2, sort_keys=True)
    sys.exit(0 if all(c.passed for c in certs) else 2)


if __name__ == "__main__":
    main()
