#include "rvote/voting.hpp"

#include <ostream>
#include <stdexcept>

#include "rvote/errors.hpp"

namespace rvote {

namespace {

void check_group(const GroupPredictions& gp) {
    if (gp.labels.empty()) throw std::invalid_argument("vote: empty group");
    if (gp.class_count < 1) throw std::invalid_argument("vote: class_count must be >= 1");
    for (int y : gp.labels)
        if (y < 0 || y >= gp.class_count)
            throw std::invalid_argument("vote: label out of range");
}

}  // namespace

VoteOutcome hard_vote(const GroupPredictions& gp) {
    check_group(gp);
    VoteOutcome out;
    out.scheme = VoteScheme::Hard;
    out.tally.assign(static_cast<std::size_t>(gp.class_count), 0.0);
    for (int y : gp.labels) out.tally[static_cast<std::size_t>(y)] += 1.0;

    double max_votes = 0.0;
    for (double v : out.tally) max_votes = std::max(max_votes, v);
    std::vector<int> tied;
    for (int c = 0; c < gp.class_count; ++c)
        if (out.tally[static_cast<std::size_t>(c)] == max_votes) tied.push_back(c);

    out.tie_broken = tied.size() > 1;
    if (!out.tie_broken) {
        out.winner = tied.front();
        return out;
    }
    if (gp.dists.empty()) {
        out.winner = tied.front();  // lowest index
        return out;
    }
    // Highest summed probability among the tied classes; lowest index on an
    // exact residual tie.
    int best = tied.front();
    double best_sum = -1.0;
    for (int c : tied) {
        double sum = 0.0;
        for (const auto& d : gp.dists) sum += d[static_cast<std::size_t>(c)];
        if (sum > best_sum) {
            best_sum = sum;
            best = c;
        }
    }
    out.winner = best;
    return out;
}

VoteOutcome soft_vote(const GroupPredictions& gp) {
    check_group(gp);
    if (gp.dists.empty())
        throw UnsupportedSchemeError("soft_vote: group carries no probability distributions");
    if (gp.dists.size() != gp.labels.size())
        throw std::invalid_argument("soft_vote: labels/dists size mismatch");

    VoteOutcome out;
    out.scheme = VoteScheme::Soft;
    out.tally.assign(static_cast<std::size_t>(gp.class_count), 0.0);
    for (const auto& d : gp.dists) {
        if (d.size() != static_cast<std::size_t>(gp.class_count))
            throw std::invalid_argument("soft_vote: distribution length mismatch");
        for (std::size_t c = 0; c < d.size(); ++c) out.tally[c] += d[c];
    }
    for (double& v : out.tally) v /= static_cast<double>(gp.dists.size());

    out.winner = argmax_lowest(out.tally);
    for (std::size_t c = 0; c < out.tally.size(); ++c)
        if (static_cast<int>(c) != out.winner && out.tally[c] == out.tally[static_cast<std::size_t>(out.winner)])
            out.tie_broken = true;
    return out;
}

VoteOutcome vote(const GroupPredictions& gp, VoteScheme scheme) {
    return scheme == VoteScheme::Hard ? hard_vote(gp) : soft_vote(gp);
}

double score_groups(std::span<const GroupPredictions> groups, VoteScheme scheme) {
    if (groups.empty()) throw std::invalid_argument("score_groups: empty input");
    std::size_t correct = 0;
    for (const auto& gp : groups)
        if (vote(gp, scheme).winner == gp.true_label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(groups.size());
}

void write_group_audit_csv(std::ostream& os, std::span<const GroupPredictions> groups) {
    os << "source_id,true,hard_winner,soft_winner,tie_broken,labels\n";
    for (const auto& gp : groups) {
        const VoteOutcome hard = hard_vote(gp);
        const bool has_dists = !gp.dists.empty();
        os << gp.source_id << ',' << gp.true_label << ',' << hard.winner << ',';
        if (has_dists)
            os << soft_vote(gp).winner;
        os << ',' << (hard.tie_broken ? "true" : "false");
        for (int y : gp.labels) os << ',' << y;
        os << "\n";
    }
}

}  // namespace rvote
