#!/usr/bin/env python3
"""Build a small furnished room and run a few inference pipelines.

Writes the fact document, a Mermaid relation graph, and an OBJ scene
into the chosen output directory, and prints pipeline results.
"""

import argparse
import math
import os

from spatrel import (
    AdjustmentSettings, FactBase, SpatialObject, Taxonomy,
    dumps_facts, export_mermaid, export_scene, run_pipeline,
)


def build_room() -> FactBase:
    fb = FactBase()
    # 4 x 3 m room, walls 0.1 m thick and 2.5 m high, laid out as a
    # pinwheel: each wall runs past one corner and butts against the
    # side of the next wall, so adjacent walls touch without overlap
    fb.upsert(SpatialObject(id="wall-n", x=0.05, y=0.0, z=1.55, w=4.1, h=2.5,
                            d=0.1, angle=math.pi, label="wall", type="wall"))
    fb.upsert(SpatialObject(id="wall-s", x=-0.05, y=0.0, z=-1.55, w=4.1,
                            h=2.5, d=0.1, angle=0.0, label="wall", type="wall"))
    fb.upsert(SpatialObject(id="wall-e", x=2.05, y=0.0, z=-0.05, w=3.1, h=2.5,
                            d=0.1, angle=math.pi / 2, label="wall", type="wall"))
    fb.upsert(SpatialObject(id="wall-w", x=-2.05, y=0.0, z=0.05, w=3.1, h=2.5,
                            d=0.1, angle=-math.pi / 2, label="wall", type="wall"))
    fb.upsert(SpatialObject(id="table", x=0.8, y=0.0, z=0.6, w=1.2, h=0.75,
                            d=0.8, label="table", type="table"))
    fb.upsert(SpatialObject(id="lamp", x=0.6, y=0.75, z=0.5, w=0.2, h=0.45,
                            d=0.2, label="lamp", type="lamp"))
    fb.upsert(SpatialObject(id="chair", x=0.8, y=0.0, z=-0.4, w=0.5, h=0.9,
                            d=0.5, label="chair", type="chair"))
    fb.upsert(SpatialObject(id="shelf", x=-1.7, y=0.0, z=0.0, w=0.4, h=1.8,
                            d=1.2, angle=math.pi / 2, label="shelf",
                            type="shelf"))
    fb.upsert(SpatialObject(id="user", x=-0.5, y=0.0, z=-1.0, w=0.4, h=1.75,
                            d=0.3, angle=math.atan2(1.3, 1.6), label="user",
                            type="person", observer=True))
    return fb


def build_taxonomy() -> Taxonomy:
    tax = Taxonomy()
    tax.add_class("furniture")
    tax.add_subclass("table", "furniture")
    tax.add_subclass("chair", "furniture")
    tax.add_subclass("shelf", "furniture")
    tax.add_class("structure")
    tax.add_subclass("wall", "structure")
    return tax


PIPELINES = [
    ("whats on the table",
     "deduce(connectivity) | filter(type == 'table') | pick(on)"),
    ("nearest object to the user",
     "deduce(topology) | filter(id == 'user') | pick(disjoint) "
     "| sort(disjoint.delta <) | slice(1)"),
    ("furniture in the room",
     "isa(furniture)"),
    ("room box grouped from the walls",
     "filter(type == 'wall') | produce(group : label = 'room')"),
    ("corner markers where walls touch",
     "filter(type == 'wall') | produce(by : label = 'corner'; h = 0.02)"),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out", help="export directory")
    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    fb = build_room()
    settings = AdjustmentSettings()
    taxonomy = build_taxonomy()

    for title, text in PIPELINES:
        result = run_pipeline(text, fb, settings, taxonomy, observer_id="user")
        print("%-35s -> %s" % (title, ", ".join(o.id for o in result.objects)))

    run_pipeline("deduce(topology connectivity)", fb, settings)
    with open(os.path.join(args.out_dir, "room.json"), "w") as f:
        f.write(dumps_facts(fb, settings))
    with open(os.path.join(args.out_dir, "room.mmd"), "w") as f:
        labels = {o.id: o.label for o in fb.object_list()}
        f.write(export_mermaid(fb.relations_list(), ("on", "at", "by"), labels))
    with open(os.path.join(args.out_dir, "room.obj"), "w") as f:
        f.write(export_scene(fb.object_list()))
    print("exports written to %s/" % args.out_dir)


if __name__ == "__main__":
    main()
