#!/usr/bin/env python3
"""Writes the deterministic synthetic corpus used by the examples and tests.

Descriptions carry the phrases the class queries look for; titles and
abstracts use class-typical vocabulary so a text model can learn them.
"""

import argparse
import json
import random

CLASSES = {
    "Y02G": dict(
        trigger=["The product is a green plastic with a low carbon footprint."],
        title=["Green plastic composition", "Sustainable green polymer article"],
        abstract=["A sustainable green polymer composition with reduced emissions."],
    ),
    "Y02G10/00": dict(
        trigger=["The invention helps recycle plastic containers in a closed loop."],
        title=["Plastic recycling method", "Process for recycling polymer articles"],
        abstract=["A recycling process returns used polymer articles to production."],
    ),
    "Y02G10/10": dict(
        trigger=["Plastic waste is gathered at the facility.",
                 "Mixed streams are sorted so that each plastic fraction is isolated."],
        title=["Sorting apparatus for plastic waste", "Waste collection and sorting line"],
        abstract=["A sorting line separates post consumer waste into clean fractions "
                  "using optical sensors and conveyors."],
    ),
    "Y02G10/20": dict(
        trigger=["Recycled plastic is depolymerized to recover monomers.",
                 "Recycled plastic residues are composted under controlled conditions."],
        title=["Depolymerization of polymer waste", "Chemical recovery of monomers"],
        abstract=["Monomers are recovered by depolymerization of collected polymer "
                  "residues in a catalytic reactor."],
    ),
    "Y02G10/22": dict(
        trigger=["The plastic is recycled by melt extrusion into pellets."],
        title=["Extrusion of regranulate pellets", "Pelletizing line for regrind"],
        abstract=["Shredded regrind is melted in an extruder and cut into pellets "
                  "for new mouldings."],
    ),
    "Y02G10/24": dict(
        trigger=["The process enables feedstock recycling of mixed plastic."],
        title=["Pyrolysis of mixed polymer feedstock", "Cracking unit for polymer oil"],
        abstract=["Mixed polymer scrap is cracked by pyrolysis into an oil feedstock "
                  "for refinery units."],
    ),
    "Y02G20/00": dict(
        trigger=["This material serves as an alternative plastic for packaging."],
        title=["Alternative packaging material", "Substitute material for packaging"],
        abstract=["A substitute packaging material replaces conventional petroleum "
                  "based films."],
    ),
    "Y02G20/10": dict(
        trigger=["A biodegradable plastic film is formed from starch.",
                 "The bioplastic is derived from lactic acid."],
        title=["Biodegradable starch film", "Polylactic acid bioplastic article"],
        abstract=["A biodegradable film made from starch and polylactic acid "
                  "decomposes in soil."],
    ),
    "Y02G20/20": dict(
        trigger=["The resin forms a vitrimer network with exchangeable bonds."],
        title=["Vitrimer resin with exchangeable bonds", "Reprocessable vitrimer composite"],
        abstract=["A vitrimer resin with dynamic exchangeable bonds can be reshaped "
                  "and reprocessed after curing."],
    ),
}

NEGATIVE_TOPICS = [
    dict(title=["Battery electrode coating", "Lithium cell cathode"],
         abstract=["A cathode slurry is coated on a metal foil to improve cell capacity."],
         body=["The electrode is dried and calendered.", "Cells are cycled at high rate."]),
    dict(title=["Wind turbine blade root", "Rotor blade bearing"],
         abstract=["A blade root insert transfers loads from the rotor blade to the hub."],
         body=["The insert is bonded with epoxy.", "Fatigue loads are reduced."]),
    dict(title=["Engine fuel injection control", "Combustion timing controller"],
         abstract=["An injection controller adjusts timing based on cylinder pressure."],
         body=["A sensor measures cylinder pressure.", "The controller updates timing."]),
    dict(title=["Medical catheter valve", "Infusion line connector"],
         abstract=["A valve in the catheter hub prevents backflow during infusion."],
         body=["The valve opens under pressure.", "A luer connector is provided."]),
    dict(title=["Optical fibre connector", "Fibre alignment ferrule"],
         abstract=["A ferrule aligns two optical fibres with low insertion loss."],
         body=["The ferrule is made of zirconia.", "Loss is below half a decibel."]),
]

# Negatives with a plastic mention that no class query accepts.
PLASTIC_NEGATIVE_BODY = [
    "The housing is moulded from a rigid plastic.",
    "A plastic cover protects the circuit board.",
]

FILLER = [
    "The embodiment is described with reference to the drawings.",
    "Further advantages follow from the dependent claims.",
    "Temperatures between twenty and eighty degrees are preferred.",
    "The apparatus may be operated continuously or in batches.",
    "Various modifications are possible within the scope of the invention.",
]

NON_ENGLISH = [
    ("de", "Verfahren zur Wiederverwertung", "Ein Verfahren zur Wiederverwertung von Kunststoff.",
     "Der Kunststoff wird recycelt."),
    ("fr", "Procede de recyclage", "Un procede de recyclage du plastique.",
     "Le plastique est recycle."),
    ("de", "Biologisch abbaubare Folie", "Eine Folie aus Staerke.", "Die Folie zerfaellt."),
    ("es", "Envase alternativo", "Un envase de material alternativo.", "El envase es ligero."),
]


def pick(rng, items):
    return items[rng.randrange(len(items))]


def positive_doc(rng, doc_id, codes):
    title = pick(rng, CLASSES[codes[0]]["title"])
    abstract = " ".join(CLASSES[c]["abstract"][0] for c in codes)
    sentences = [pick(rng, CLASSES[c]["trigger"]) for c in codes]
    sentences += rng.sample(FILLER, 2)
    rng.shuffle(sentences)
    return dict(id=doc_id, lang="en", title=title, abstract=abstract,
                description=" ".join(sentences))


def negative_doc(rng, doc_id, with_plastic):
    topic = pick(rng, NEGATIVE_TOPICS)
    sentences = list(topic["body"]) + rng.sample(FILLER, 2)
    if with_plastic:
        sentences.append(pick(rng, PLASTIC_NEGATIVE_BODY))
    rng.shuffle(sentences)
    return dict(id=doc_id, lang="en", title=pick(rng, topic["title"]),
                abstract=topic["abstract"][0], description=" ".join(sentences))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="data/sample_corpus.jsonl")
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()
    rng = random.Random(args.seed)

    codes = list(CLASSES)
    lines = []
    n = 0

    def next_id():
        nonlocal n
        n += 1
        return "EP%07d" % (1000000 + n)

    # 63 positives: seven per class, every fourth one with a second class.
    for i in range(63):
        primary = codes[i % len(codes)]
        chosen = [primary]
        if i % 4 == 3:
            other = pick(rng, codes)
            if other != primary:
                chosen.append(other)
        lines.append(json.dumps(positive_doc(rng, next_id(), chosen)))
    for i in range(126):
        lines.append(json.dumps(negative_doc(rng, next_id(), with_plastic=(i % 3 == 0))))
    for lang, title, abstract, description in NON_ENGLISH:
        lines.append(json.dumps(dict(id=next_id(), lang=lang, title=title,
                                     abstract=abstract, description=description)))
    # Records the filter drops for missing content.
    lines.append(json.dumps(dict(id=next_id(), lang="en", title="Plastic recycling plant",
                                 abstract=None, description="Recycled plastic is extruded.")))
    lines.append(json.dumps(dict(id=next_id(), lang="en", title="",
                                 abstract="An empty title record.",
                                 description="Nothing to see.")))
    lines.append(json.dumps(dict(id=next_id(), lang="en", title="No description",
                                 abstract="The description field is absent.")))
    while n < 200:
        lines.append(json.dumps(negative_doc(rng, next_id(), with_plastic=False)))
    rng.shuffle(lines)
    # One malformed line, which readers skip and report.
    lines.insert(17, '{"id": "EP_BROKEN", "lang": "en", "title": ')

    with open(args.output, "w", encoding="utf-8") as out:
        out.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
