#!/usr/bin/env python3
"""Convert a d3-celestial star GeoJSON file (Hipparcos-derived) into the raw
catalog CSV consumed by `starid build-catalog`.

    npm pack d3-celestial@0.7.35 && tar xzf d3-celestial-0.7.35.tgz
    python3 tools/hipparcos_csv.py package/data/stars.8.json data/hipparcos_mag7.csv --max-mag 7.0

GeoJSON longitudes are in [-180, 180); they are wrapped to RA in [0, 360).
"""
import argparse
import csv
import json


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("geojson")
    ap.add_argument("out_csv")
    ap.add_argument("--max-mag", type=float, default=7.0)
    args = ap.parse_args()

    with open(args.geojson, encoding="utf-8") as fh:
        features = json.load(fh)["features"]

    rows = []
    for f in features:
        mag = float(f["properties"]["mag"])
        if mag > args.max_mag:
            continue
        lon, lat = f["geometry"]["coordinates"]
        ra = lon + 360.0 if lon < 0 else lon
        if ra >= 360.0:
            ra -= 360.0
        rows.append((int(f["id"]), ra, float(lat), mag))
    rows.sort()

    with open(args.out_csv, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "ra_deg", "dec_deg", "vmag"])
        for hip, ra, dec, mag in rows:
            w.writerow([hip, f"{ra:.4f}", f"{dec:.4f}", f"{mag:.2f}"])
    print(f"wrote {len(rows)} stars to {args.out_csv}")


if __name__ == "__main__":
    main()
