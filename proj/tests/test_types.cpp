#include <gtest/gtest.h>

#include "langcheck/errors.hpp"
#include "langcheck/types.hpp"

namespace langcheck {
namespace {

TEST(Types, LabelNamesRoundTrip) {
  for (Label l : {Label::Acceptable, Label::Unacceptable}) {
    EXPECT_EQ(label_from_string(to_string(l)), l);
  }
  EXPECT_THROW(label_from_string("fair"), InputError);
}

TEST(Types, SourceNamesRoundTrip) {
  for (Source s : {Source::Hsd, Source::Sbic, Source::Climate, Source::Health, Source::Toxigen,
                   Source::Mgfn}) {
    EXPECT_EQ(source_from_string(to_string(s)), s);
  }
  EXPECT_THROW(source_from_string("HSD"), InputError);
}

TEST(Types, TaskGroups) {
  EXPECT_EQ(task_group_of(Source::Climate), TaskGroup::Fact);
  EXPECT_EQ(task_group_of(Source::Health), TaskGroup::Fact);
  EXPECT_EQ(task_group_of(Source::Mgfn), TaskGroup::Fact);
  EXPECT_EQ(task_group_of(Source::Hsd), TaskGroup::Fairness);
  EXPECT_EQ(task_group_of(Source::Sbic), TaskGroup::Fairness);
  EXPECT_EQ(task_group_of(Source::Toxigen), TaskGroup::Fairness);
}

TEST(Types, VerdictLabelFollowsPath) {
  EXPECT_EQ(Verdict(DecisionPath::GenerativeExplicitNo, "No").label(), Label::Unacceptable);
  EXPECT_EQ(Verdict(DecisionPath::EntailWins, "").label(), Label::Unacceptable);
  EXPECT_EQ(Verdict(DecisionPath::GenerativeYes, "").label(), Label::Acceptable);
  EXPECT_EQ(Verdict(DecisionPath::GenerativeNonAnswer, "").label(), Label::Acceptable);
  EXPECT_EQ(Verdict(DecisionPath::ContradictWinsOrTie, "").label(), Label::Acceptable);
}

TEST(Types, DecisionPathNamesRoundTrip) {
  for (DecisionPath p : {DecisionPath::GenerativeYes, DecisionPath::GenerativeExplicitNo,
                         DecisionPath::GenerativeNonAnswer, DecisionPath::EntailWins,
                         DecisionPath::ContradictWinsOrTie}) {
    EXPECT_EQ(decision_path_from_string(to_string(p)), p);
  }
}

TEST(Types, ScoresValidation) {
  EXPECT_NO_THROW(EntailmentScores::make(0.2, 0.3, 0.5));
  EXPECT_NO_THROW(EntailmentScores::make(0.2, 0.3, 0.50005));
  EXPECT_THROW(EntailmentScores::make(0.2, 0.3, 0.6), InputError);
  EXPECT_THROW(EntailmentScores::make(-0.1, 0.6, 0.5), InputError);
  EXPECT_THROW(EntailmentScores::make(1.1, 0.0, -0.1), InputError);
  EXPECT_FALSE((EntailmentScores{0.5, 0.5, 0.5}.valid()));
}

TEST(Types, RecordValidation) {
  ClaimRecord r{"x-1", Source::Climate, "Claim text", Label::Acceptable, {}, {}, {}};
  EXPECT_NO_THROW(r.validate());
  r.text = "   ";
  EXPECT_THROW(r.validate(), InputError);
  r.text = "ok";
  r.document = "doc";
  EXPECT_THROW(r.validate(), InputError);
  r.source = Source::Mgfn;
  EXPECT_THROW(r.validate(), InputError);
  r.question = "q";
  r.answer = "a";
  EXPECT_NO_THROW(r.validate());
}

}  // namespace
}  // namespace langcheck
