#!/usr/bin/env python3
"""Generate the bundled synthetic datasets under data/.

Output is deterministic: rerunning rewrites byte-identical files.

    python3 tools/gen_datasets.py [--out data]
"""
import argparse
import json
import math
import os
import random

EXTENT = 10000.0
MINUTE = 60_000
HOUR = 60 * MINUTE
UNIT_MS = 10 * MINUTE

ADJECTIVES = [
    "Amber", "Azure", "Bright", "Cedar", "Copper", "Crimson", "Dapper", "Emerald", "Fern", "Golden",
    "Granite", "Hazel", "Indigo", "Ivory", "Jade", "Juniper", "Lavender", "Lunar", "Maple", "Marble",
    "Misty", "Noble", "Olive", "Pearl", "Quiet", "Rustic", "Saffron", "Scarlet", "Silver", "Solar",
    "Sterling", "Sunny", "Tawny", "Topaz", "Velvet", "Violet", "Willow", "Wren", "Zephyr", "Cobalt",
]
NOUNS = [
    "Oak", "Fox", "Lantern", "Anchor", "Badger", "Beacon", "Compass", "Crown", "Falcon", "Feather",
    "Garden", "Heron", "Hollow", "Ivy", "Kestrel", "Lark", "Meadow", "Orchard", "Otter", "Pebble",
    "Pine", "Quill", "Raven", "Robin", "Sparrow", "Thistle", "Tulip", "Vine", "Acorn", "Bramble",
]
CATEGORIES = [
    "Bakery", "Cafe", "Pharmacy", "Bookshop", "Gallery", "Bistro", "Florist", "Garage", "Chapel", "Clinic",
]
FOOD_ADJ = [
    "Hungry", "Crispy", "Speedy", "Happy", "Spicy", "Smoky", "Tasty", "Jolly", "Lucky", "Rapid",
    "Sizzling", "Cheeky", "Mighty", "Tiny", "Royal",
]
FOOD_BRANDS = ["Burger", "Chicken", "Pizza", "Kebab", "Taco", "Noodle", "Fries", "Wrap", "Hotdog", "Donut"]
FOOD_SUFFIX = ["Bar", "Shack", "Hut", "Express"]
STREET_WORDS = [
    "High", "Station", "Church", "Victoria", "Queen", "Market", "Bridge", "Chapel", "Castle", "Manor",
    "Windsor", "Albion", "Grove", "Union", "Temple", "Abbey", "Canal", "Forge", "Granary", "Priory",
]
STREET_KINDS = ["Street", "Avenue", "Lane", "Way"]


def fmt(v):
    r = round(v, 1)
    if r == int(r):
        return str(int(r))
    return repr(r)


def wkt_point(p):
    return f"POINT ({fmt(p[0])} {fmt(p[1])})"


def wkt_line(pts):
    return "LINESTRING (" + ", ".join(f"{fmt(x)} {fmt(y)}" for x, y in pts) + ")"


def wkt_polygon(ring):
    closed = list(ring) + [ring[0]]
    return "POLYGON ((" + ", ".join(f"{fmt(x)} {fmt(y)}" for x, y in closed) + "))"


def mpoint(units):
    if not units:
        return "MPOINT EMPTY"
    parts = [f"({t0} {t1} {fmt(a[0])} {fmt(a[1])} {fmt(b[0])} {fmt(b[1])})" for t0, t1, a, b in units]
    return "MPOINT (" + ", ".join(parts) + ")"


def rounded(p):
    return (round(p[0], 1), round(p[1], 1))


def grid_districts(rng, names, cols, rows, x0, y0, x1, y1, jitter):
    xs = [x0 + (x1 - x0) * i / cols for i in range(cols + 1)]
    ys = [y0 + (y1 - y0) * j / rows for j in range(rows + 1)]
    verts = {}
    for i in range(cols + 1):
        for j in range(rows + 1):
            dx = 0 if i in (0, cols) else rng.uniform(-jitter, jitter)
            dy = 0 if j in (0, rows) else rng.uniform(-jitter, jitter)
            verts[(i, j)] = rounded((xs[i] + dx, ys[j] + dy))
    out = []
    k = 0
    for j in range(rows):
        for i in range(cols):
            ring = [verts[(i, j)], verts[(i + 1, j)], verts[(i + 1, j + 1)], verts[(i, j + 1)]]
            out.append((names[k], ring))
            k += 1
    return out


def blob(rng, cx, cy, rmin, rmax, n=8):
    ring = []
    for i in range(n):
        a = 2 * math.pi * (i + rng.uniform(0, 0.6)) / n
        r = rng.uniform(rmin, rmax)
        ring.append(rounded((cx + r * math.cos(a), cy + r * math.sin(a))))
    return ring


def point_in_ring(p, ring):
    x, y = p
    inside = False
    n = len(ring)
    for i in range(n):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % n]
        if (ay > y) != (by > y):
            xi = (bx - ax) * (y - ay) / (by - ay) + ax
            if x < xi:
                inside = not inside
    return inside


def random_polyline(rng, n, margin=200.0):
    pts = []
    while len(pts) < n:
        p = rounded((rng.uniform(margin, EXTENT - margin), rng.uniform(margin, EXTENT - margin)))
        if not pts or p != pts[-1]:
            pts.append(p)
    return pts


def crossing_polyline(rng, n):
    """West-to-east meandering line, like a river."""
    pts = []
    for i in range(n):
        x = EXTENT * i / (n - 1)
        y = rng.uniform(0.25, 0.75) * EXTENT
        pts.append(rounded((x, y)))
    return pts


def unique_names(rng, count, parts):
    combos = [" ".join(c) for c in _product(parts)]
    rng.shuffle(combos)
    assert len(combos) >= count
    return combos[:count]


def _product(parts):
    if not parts:
        yield ()
        return
    for head in parts[0]:
        for tail in _product(parts[1:]):
            yield (head,) + tail


def along(path, s):
    """Position at arc length s along path, bouncing back and forth."""
    seg = [math.dist(path[i], path[i + 1]) for i in range(len(path) - 1)]
    total = sum(seg)
    s = s % (2 * total)
    if s > total:
        s = 2 * total - s
    for i, length in enumerate(seg):
        if s <= length or i == len(seg) - 1:
            f = 0 if length == 0 else min(1.0, s / length)
            a, b = path[i], path[i + 1]
            return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
        s -= length
    return path[-1]


def route_units(rng, start, end, speed):
    path = random_polyline(rng, 6)
    offset = rng.uniform(0, 5000)
    units = []
    t = start
    while t < end:
        t1 = min(end, t + UNIT_MS)
        a = rounded(along(path, offset + speed * (t - start) / 1000))
        b = rounded(along(path, offset + speed * (t1 - start) / 1000))
        units.append((t, t1, a, b))
        t = t1
    return units


def wander_units(rng, start, end, step):
    units = []
    t = start
    p = rounded((rng.uniform(500, 9500), rng.uniform(500, 9500)))
    while t < end:
        t1 = min(end, t + UNIT_MS)
        q = rounded((min(EXTENT, max(0.0, p[0] + rng.uniform(-step, step))),
                     min(EXTENT, max(0.0, p[1] + rng.uniform(-step, step)))))
        units.append((t, t1, p, q))
        p = q
        t = t1
    return units


def write_relation(out_dir, name, header, rows):
    path = os.path.join(out_dir, f"{name}.tsv")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\t".join(header) + "\n")
        for r in rows:
            f.write("\t".join(r) + "\n")


def write_catalog(out_dir, name, relations):
    cat = {"name": name, "epoch": "day0", "relations": []}
    for rel, attrs in relations:
        cat["relations"].append({
            "name": rel,
            "file": f"{rel}.tsv",
            "attributes": [{"name": a, "kind": k, "indexed": idx} for a, k, idx in attrs],
        })
    with open(os.path.join(out_dir, "catalog.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(cat, f, indent=2)
        f.write("\n")


def gen_pois(rng, count, skip=None):
    names = unique_names(rng, count, [ADJECTIVES, NOUNS, CATEGORIES])
    rows = []
    for n in names:
        p = rounded((rng.uniform(0, EXTENT), rng.uniform(0, EXTENT)))
        rows.append([n, n.split()[-1].lower(), wkt_point(p)])
    return rows


def gen_minicity(out_dir, seed):
    rng = random.Random(seed)
    os.makedirs(out_dir, exist_ok=True)
    names = ["Northgate", "Riverside", "Old Town", "Harbor", "Eastfield", "Westbrook",
             "Hillcrest", "Southmoor", "Kingsbury", "Ashford", "Mill End", "Greenway"]
    districts = grid_districts(rng, names, 4, 3, 0, 0, EXTENT, EXTENT, 350)
    write_relation(out_dir, "districts", ["name", "area"], [[n, wkt_polygon(r)] for n, r in districts])

    write_relation(out_dir, "pois", ["name", "type", "pos"], gen_pois(rng, 10000))

    street_names = unique_names(rng, 40, [STREET_WORDS, STREET_KINDS])
    roads = [[n, wkt_line(random_polyline(rng, rng.randint(3, 6)))] for n in street_names]
    write_relation(out_dir, "roads", ["name", "route"], roads)

    rivers = [[n, wkt_line(crossing_polyline(rng, 9))] for n in ["River Aldon", "River Brent", "River Colne"]]
    write_relation(out_dir, "rivers", ["name", "course"], rivers)

    unis = ["Beaumont University", "Redcliffe College", "Carrow Polytechnic",
            "Larkfield College", "Somerton Institute", "Halden Academy"]
    campuses = []
    for n in unis:
        c = (rng.uniform(800, 9200), rng.uniform(800, 9200))
        campuses.append([n, wkt_polygon(blob(rng, c[0], c[1], 250, 500))])
    write_relation(out_dir, "universities", ["name", "campus"], campuses)

    vehicles = []
    for i in range(1, 41):
        vehicles.append([f"train{i}", "train", mpoint(route_units(rng, 5 * HOUR, 23 * HOUR, rng.uniform(8, 14)))])
    for i in range(1, 41):
        start = rng.randrange(0, 12) * HOUR
        first = wander_units(rng, start, start + rng.randrange(2, 5) * HOUR, 600)
        gap = first[-1][1] + HOUR
        second = wander_units(rng, gap, gap + rng.randrange(2, 5) * HOUR, 600)
        vehicles.append([f"taxi{i}", "taxi", mpoint(first + second)])
    write_relation(out_dir, "vehicles", ["name", "type", "trip"], vehicles)

    write_catalog(out_dir, "minicity", [
        ("districts", [("name", "text", False), ("area", "region", True)]),
        ("pois", [("name", "text", False), ("type", "text", False), ("pos", "point", True)]),
        ("roads", [("name", "text", False), ("route", "line", False)]),
        ("rivers", [("name", "text", False), ("course", "line", False)]),
        ("universities", [("name", "text", False), ("campus", "region", True)]),
        ("vehicles", [("name", "text", False), ("type", "text", False), ("trip", "mpoint", False)]),
    ])


def gen_london(out_dir, seed):
    rng = random.Random(seed)
    os.makedirs(out_dir, exist_ok=True)
    boroughs = ["Camden", "Islington", "Hackney", "Westminster", "City of London", "Tower Hamlets",
                "Kensington", "Lambeth", "Southwark"]
    districts = [("London", [(0.0, 0.0), (EXTENT, 0.0), (EXTENT, EXTENT), (0.0, EXTENT)])]
    districts += grid_districts(rng, boroughs, 3, 3, 0, 0, EXTENT, EXTENT, 400)
    write_relation(out_dir, "districts", ["name", "area"], [[n, wkt_polygon(r)] for n, r in districts])

    unis = ["Imperial College", "Kings College", "University College", "Queen Mary", "Birkbeck",
            "Goldsmiths", "City University", "Royal Holloway"]
    campus_rings = []
    rows = []
    for n in unis:
        c = (rng.uniform(800, 9200), rng.uniform(800, 9200))
        ring = blob(rng, c[0], c[1], 250, 450)
        campus_rings.append((c, ring))
        rows.append([n, wkt_polygon(ring)])
    write_relation(out_dir, "universities", ["name", "campus"], rows)

    food_names = unique_names(rng, 600, [FOOD_ADJ, FOOD_BRANDS, FOOD_SUFFIX])
    food = []
    for i, n in enumerate(food_names):
        if i < 5 * len(campus_rings):
            c, ring = campus_rings[i // 5]
            while True:
                p = rounded((c[0] + rng.uniform(-250, 250), c[1] + rng.uniform(-250, 250)))
                if point_in_ring(p, ring):
                    break
        else:
            p = rounded((rng.uniform(0, EXTENT), rng.uniform(0, EXTENT)))
        food.append([n, wkt_point(p)])
    write_relation(out_dir, "fastfood", ["name", "pos"], food)

    write_relation(out_dir, "pois", ["name", "type", "pos"], gen_pois(rng, 3000))

    rivers = [[n, wkt_line(crossing_polyline(rng, 11))] for n in ["River Thames", "River Lea", "River Fleet"]]
    write_relation(out_dir, "rivers", ["name", "course"], rivers)

    buses = []
    for i in range(1, 16):
        buses.append([f"bus{i}", "bus", mpoint(route_units(rng, 6 * HOUR, 22 * HOUR, rng.uniform(5, 9)))])
    write_relation(out_dir, "buses", ["name", "type", "trip"], buses)

    write_catalog(out_dir, "minicity-london", [
        ("districts", [("name", "text", False), ("area", "region", True)]),
        ("universities", [("name", "text", False), ("campus", "region", True)]),
        ("fastfood", [("name", "text", False), ("pos", "point", True)]),
        ("pois", [("name", "text", False), ("type", "text", False), ("pos", "point", True)]),
        ("rivers", [("name", "text", False), ("course", "line", False)]),
        ("buses", [("name", "text", False), ("type", "text", False), ("trip", "mpoint", False)]),
    ])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    gen_minicity(os.path.join(args.out, "minicity"), 20240611)
    gen_london(os.path.join(args.out, "minicity-london"), 20240612)


if __name__ == "__main__":
    main()
