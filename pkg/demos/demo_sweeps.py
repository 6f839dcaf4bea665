"""Reproduce the two experiment sweeps on the synthetic corpus.

Sweep 1 varies the number of labeled examples per class at K = 21.
Sweep 2 varies K from 18 to 26 with a single labeled example per class;
the mean ARI peaks at (or next to) the true class count.
"""

from protoabs import default_synth_spec, generate_synthetic, sweep_k, sweep_labels

SEEDS = [0, 1, 2]


def main():
    corpus, labels = generate_synthetic(default_synth_spec())

    print("labels/class -> mean purity, mean ARI over seeds %s" % SEEDS)
    _, means = sweep_labels(corpus, labels, counts=[1, 2, 3, 4, 5], seeds=SEEDS)
    for c in sorted(means):
        print("  %d: purity=%.4f ari=%.4f" % (c, means[c][0], means[c][1]))

    print("K -> mean purity, mean ARI (1 label/class)")
    _, means, best_k = sweep_k(corpus, labels, k_values=range(18, 27), seeds=SEEDS)
    for k in sorted(means):
        marker = "  <-- best" if k == best_k else ""
        print("  K=%d: purity=%.4f ari=%.4f%s" % (k, means[k][0], means[k][1], marker))


if __name__ == "__main__":
    main()
