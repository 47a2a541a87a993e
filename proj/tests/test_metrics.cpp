#include <cmath>
#include <sstream>

#include "test_support.hpp"

using namespace aml;

namespace {

std::vector<LabeledExample> all_bar_examples() {
  std::vector<LabeledExample> out;
  for (auto& img : all_images(2, 2)) {
    bool bar = has_vertical_bar(img);
    out.push_back({std::move(img), bar});
  }
  return out;
}

// The toy relations as labeled images, in the encoder's pixel order.
std::vector<LabeledExample> toy_training(const ImageEncoder& enc) {
  std::vector<LabeledExample> out;
  for (const auto& img : all_images(2, 2)) {
    auto t = enc.encode(img);
    for (auto [fp, label] : {std::pair{ConstantSet{0, 1, 6, 7}, true}, {ConstantSet{2, 3, 4, 5}, true},
                             {ConstantSet{1, 3, 4, 6}, false}, {ConstantSet{2, 4, 5, 7}, false},
                             {ConstantSet{3, 4, 5, 6}, false}})
      if (t == fp) out.push_back({img, label});
  }
  return out;
}

}  // namespace

TEST(PredictedError, FrozenValues) {
  EXPECT_NEAR(predicted_error(98, 1000), 0.0538, 5e-5);
  EXPECT_EQ(predicted_error(0, 10), 0.0);
  EXPECT_LT(predicted_error(98, 1e12), 1e-9);
  EXPECT_EQ(predicted_error(98, 1), 1.0);  // clipped
}

TEST(PredictedErrorSymmetric, FrozenValues) {
  EXPECT_NEAR(predicted_error_symmetric(7, 1000) * 1000, 36.78, 0.01);
  EXPECT_NEAR(predicted_error_symmetric(7, 1000), 0.0368, 5e-5);
  EXPECT_NEAR(predicted_error_symmetric(1, 1000), std::log(3.0) / 1000, 1e-12);
  EXPECT_NEAR(predicted_error_symmetric(10, 1e4), 0.00797, 5e-6);
}

TEST(PredictedErrorSymmetric, NeverAboveUnsymmetric) {
  for (int d = 2; d <= 40; ++d)
    for (double kappa : {10.0, 1e3, 1e5, 1e7})
      EXPECT_LE(predicted_error_symmetric(d, kappa), predicted_error(2.0 * d * d, kappa)) << d << " " << kappa;
}

TEST(RecordEpoch, NoAtomsLeavesKappaUndefined) {
  AlgebraState st;
  auto enc = ImageEncoder::install(st, 2, 2);
  auto v = st.add_constant("v");
  auto snap = take_snapshot(st, 3);
  auto ex = all_bar_examples();
  auto r = record_epoch(snap, v.index, enc, ex, ex, 0.0);
  EXPECT_EQ(r.atoms, 0u);
  EXPECT_FALSE(r.kappa.has_value());
  EXPECT_EQ(r.constants, 8u);
  EXPECT_EQ(r.epoch, 3);
  // With no atoms every image is in v, so only the bar images are right.
  EXPECT_EQ(r.retained, 7u);
  EXPECT_NEAR(r.test_error, 9.0 / 16.0, 1e-12);
  EXPECT_NE(to_csv_row(r).find(",NA,"), std::string::npos);
}

// The two-atom toy model fits its five training images. It is not the
// complete solution: an image with only the lower-left pixel black is
// wrongly accepted, in each of its three bar-free variants.
TEST(RecordEpoch, ToyModel) {
  oracle::Toy toy(1);
  aml::testing::embed(toy.st, toy.rels);
  auto snap = take_snapshot(toy.st, 1);
  AlgebraState enc_state;
  auto enc = ImageEncoder::install_toy(enc_state);
  auto train = toy_training(enc);
  ASSERT_EQ(train.size(), 5u);

  auto r = record_epoch(snap, toy.v.index, enc, train, train, 0.0);
  EXPECT_EQ(r.atoms, 2u);
  EXPECT_EQ(r.test_error, 0.0);
  EXPECT_EQ(r.retained, 5u);
  ASSERT_TRUE(r.kappa.has_value());
  EXPECT_DOUBLE_EQ(*r.kappa, 2.5);

  auto all = all_bar_examples();
  EXPECT_NEAR(error_rate(snap, toy.v.index, enc, all), 3.0 / 16.0, 1e-12);
}

TEST(RecordEpoch, ExactModelClassifiesAllImages) {
  AlgebraState st;
  auto enc = ImageEncoder::install_toy(st);
  auto v = st.add_constant("v");
  auto snap = take_snapshot(st, 0);
  snap.atoms = exact_vertical_bar_atomization(2, 2, enc, v.index);
  auto all = all_bar_examples();
  auto r = record_epoch(snap, v.index, enc, all, all, 0.0);
  EXPECT_EQ(r.atoms, 4u);
  EXPECT_EQ(r.test_error, 0.0);
  EXPECT_EQ(r.retained, 16u);
  EXPECT_DOUBLE_EQ(*r.kappa, 4.0);
}

TEST(Csv, RoundTrip) {
  std::vector<ExperimentRecord> recs{
      {1, 120, 7, 98, 0.125, 0.0421, 120.0 / 7.0, 42},
      {2, 0, 0, 8, 0.0, 1.0, std::nullopt, 18446744073709551615ull},
      {30, 9999, 13, 50, 1e-7, 0.3333333333, 769.1538461538, 7},
  };
  std::ostringstream out;
  write_csv(out, recs);
  auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "epoch,R,Z,C,train_err,test_err,kappa,seed");
  std::istringstream in(text);
  auto back = read_csv(in);
  ASSERT_EQ(back.size(), recs.size());
  EXPECT_EQ(back[1], recs[1]);
  EXPECT_EQ(back[2].retained, 9999u);
  // Ten significant digits survive; reformatting is a fixed point.
  std::ostringstream again;
  write_csv(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(Csv, Rejects) {
  std::istringstream no_header("1,2,3,4,0,0,NA,1\n");
  EXPECT_AML_ERROR(read_csv(no_header), ParseError);
  EXPECT_AML_ERROR(from_csv_row("1,2,3"), ParseError);
  EXPECT_AML_ERROR(from_csv_row("1,2,3,4,0.5,x,NA,1"), ParseError);
}
