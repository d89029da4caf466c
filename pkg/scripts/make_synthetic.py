"""Write a seeded synthetic corpus (nodes.csv, edges.csv, planted.txt) to a directory."""

import argparse
from pathlib import Path

from citedisrupt.graph import edges_csv_text, nodes_csv_text
from citedisrupt.synthetic import CorpusConfig, synthetic_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--papers", type=int, default=CorpusConfig.n_papers)
    ap.add_argument("--years", type=int, default=CorpusConfig.n_years)
    ap.add_argument("--planted", type=int, default=CorpusConfig.n_planted)
    ap.add_argument("--seed", type=int, default=CorpusConfig.seed)
    args = ap.parse_args()

    config = CorpusConfig(n_papers=args.papers, n_years=args.years,
                          n_planted=args.planted, seed=args.seed)
    corpus = synthetic_corpus(config)
    args.outdir.mkdir(parents=True, exist_ok=True)
    (args.outdir / "nodes.csv").write_text(nodes_csv_text(corpus.graph))
    (args.outdir / "edges.csv").write_text(edges_csv_text(corpus.graph))
    (args.outdir / "planted.txt").write_text("# planted disruptive papers\n"
                                            + "".join(p + "\n" for p in corpus.planted))
    g = corpus.graph
    print(f"{g.n_nodes} papers, {g.n_edges} citations, {len(corpus.planted)} planted -> {args.outdir}")


if __name__ == "__main__":
    main()
