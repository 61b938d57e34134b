#pragma once

#include <span>
#include <string>
#include <vector>

#include "rvote/classifier.hpp"

namespace rvote {

// Per-variant predictions for one augmented group. `dists` is empty when
// the model exposes no probabilities; otherwise labels[i] is the argmax of
// dists[i] under the lowest-index tie-break. Group size is 8 in the paper
// flow but any size >= 1 is accepted.
struct GroupPredictions {
    std::string source_id;
    int true_label = -1;
    int class_count = 0;
    std::vector<int> labels;
    std::vector<ProbDist> dists;
};

enum class VoteScheme { Hard, Soft };

struct VoteOutcome {
    int winner = -1;
    VoteScheme scheme = VoteScheme::Hard;
    // Hard: per-class vote counts (sums to the group size). Soft: mean
    // distribution (sums to 1).
    std::vector<double> tally;
    bool tie_broken = false;
};

// Majority vote. Ties go to the highest summed probability among the tied
// classes when distributions are present, else to the lowest class index.
VoteOutcome hard_vote(const GroupPredictions&);

// Arithmetic mean of the distributions; argmax winner with lowest-index
// tie-break. Throws UnsupportedSchemeError when no distributions exist.
VoteOutcome soft_vote(const GroupPredictions&);

VoteOutcome vote(const GroupPredictions&, VoteScheme);

// Fraction of groups whose winner equals the true label.
double score_groups(std::span<const GroupPredictions>, VoteScheme);

// Audit CSV: source_id,true,hard_winner,soft_winner,tie_broken,labels[...].
void write_group_audit_csv(std::ostream&, std::span<const GroupPredictions>);

}  // namespace rvote
