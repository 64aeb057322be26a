#include <gtest/gtest.h>

#include <cmath>

#include "sllm/embedding_io.hpp"
#include "sllm/pca.hpp"
#include "sllm/svg.hpp"
#include "test_util.hpp"

using namespace sllm;

namespace {

EmbeddingMatrix make_embeddings(const std::vector<Vec>& rows) {
  EmbeddingMatrix em;
  em.values = Matrix(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    em.user_ids.push_back("u" + std::to_string(i));
    std::copy(rows[i].begin(), rows[i].end(), em.values.row(i).begin());
  }
  return em;
}

// Test-only Jacobi eigensolver for symmetric matrices, independent of the
// power-method path.
Vec jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) < 1e-30) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  Vec eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

}  // namespace

TEST(ExportEmbeddings, RoundTripIsExact) {
  Rng rng(301);
  std::vector<Vec> rows(7, Vec(3));
  for (auto& r : rows)
    for (auto& v : r) v = rng.normal(0, 10);
  rows[0][0] = 1.0 / 3.0;
  const EmbeddingMatrix em = make_embeddings(rows);
  testutil::TempDir dir("emb");
  export_embeddings(em, dir.file("emb.csv"));
  const EmbeddingMatrix back = load_embeddings(dir.file("emb.csv"));
  ASSERT_EQ(back.user_ids, em.user_ids);
  ASSERT_EQ(back.values.rows(), em.values.rows());
  for (std::size_t i = 0; i < em.values.size(); ++i)
    EXPECT_EQ(back.values.data()[i], em.values.data()[i]);
}

TEST(ExportEmbeddings, EmptyMatrixWritesHeaderOnly) {
  EmbeddingMatrix em;
  em.values = Matrix(0, 3);
  testutil::TempDir dir("emb_empty");
  export_embeddings(em, dir.file("emb.csv"));
  EXPECT_EQ(testutil::slurp(dir.file("emb.csv")), "user_id,e0,e1,e2\n");
}

TEST(ExportEmbeddings, SingleRowSerialization) {
  EmbeddingMatrix em;
  em.user_ids = {"u"};
  em.values = Matrix(1, 2);
  em.values(0, 0) = 0.5;
  em.values(0, 1) = -1.0;
  testutil::TempDir dir("emb_one");
  export_embeddings(em, dir.file("emb.csv"));
  EXPECT_EQ(testutil::slurp(dir.file("emb.csv")), "user_id,e0,e1\nu,0.5,-1\n");
}

TEST(Pca, CollinearPointsHaveZeroSecondComponent) {
  // points along (1,1,1)
  std::vector<Vec> rows;
  for (int i = 0; i < 6; ++i)
    rows.push_back({static_cast<double>(i), static_cast<double>(i), static_cast<double>(i)});
  const Projection2D proj = pca_project(make_embeddings(rows));
  EXPECT_NEAR(proj.explained_variance[0], 1.0, 1e-9);
  EXPECT_NEAR(proj.explained_variance[1], 0.0, 1e-9);
}

TEST(Pca, AxisAlignedDataProjectsToCenteredData) {
  // zero x-y covariance by construction; principal axes are the standard basis
  std::vector<Vec> rows = {{4, 0.5}, {-4, 0.5}, {2, -0.25}, {-2, -0.25}, {0, 1}, {0, -1.5}};
  const Projection2D proj = pca_project(make_embeddings(rows));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(std::fabs(proj.coords(i, 0)), std::fabs(rows[i][0]), 1e-8);
    EXPECT_NEAR(std::fabs(proj.coords(i, 1)), std::fabs(rows[i][1]), 1e-8);
  }
  // sign convention: largest-magnitude loading positive
  EXPECT_GT(proj.components[0][0], 0.0);
  EXPECT_GT(proj.components[1][1], 0.0);
}

TEST(Pca, MatchesJacobiOracleOnRandomCloud) {
  Rng rng(307);
  const std::size_t n = 40, d = 5;
  std::vector<Vec> rows(n, Vec(d));
  for (auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) r[j] = rng.normal(0, 1.0 + static_cast<double>(j));
  const EmbeddingMatrix em = make_embeddings(rows);
  const Projection2D proj = pca_project(em);

  // brute-force covariance eigendecomposition
  Vec mean(d, 0.0);
  for (const auto& r : rows) axpy(1.0, r, mean);
  for (auto& m : mean) m /= static_cast<double>(n);
  Matrix cov(d, d);
  for (const auto& r : rows)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov(a, b) += (r[a] - mean[a]) * (r[b] - mean[b]);
  for (std::size_t i = 0; i < cov.size(); ++i) cov.data()[i] /= static_cast<double>(n);
  const Vec eig = jacobi_eigenvalues(cov);
  double trace = 0;
  for (std::size_t i = 0; i < d; ++i) trace += cov(i, i);

  EXPECT_NEAR(proj.explained_variance[0], eig[0] / trace, 1e-6);
  EXPECT_NEAR(proj.explained_variance[1], eig[1] / trace, 1e-6);
  EXPECT_GE(proj.explained_variance[0], proj.explained_variance[1]);

  // per-component projected variance matches the eigenvalues
  for (int k = 0; k < 2; ++k) {
    double var = 0, m = 0;
    for (std::size_t i = 0; i < n; ++i) m += proj.coords(i, k);
    m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      var += (proj.coords(i, k) - m) * (proj.coords(i, k) - m);
    var /= static_cast<double>(n);
    EXPECT_NEAR(var, eig[static_cast<std::size_t>(k)], 1e-6 * trace);
  }
}

TEST(Pca, TranslationInvarianceAndRotationEquivariance) {
  Rng rng(311);
  const std::size_t n = 25, d = 4;
  std::vector<Vec> rows(n, Vec(d));
  for (auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) r[j] = rng.normal(0, 1.0 + static_cast<double>(j));
  const Projection2D base = pca_project(make_embeddings(rows));

  std::vector<Vec> shifted = rows;
  for (auto& r : shifted)
    for (std::size_t j = 0; j < d; ++j) r[j] += 100.0 + static_cast<double>(j);
  const Projection2D moved = pca_project(make_embeddings(shifted));
  for (int k = 0; k < 2; ++k)
    EXPECT_NEAR(moved.explained_variance[k], base.explained_variance[k], 1e-8);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(moved.coords(i, k), base.coords(i, k), 1e-6);

  // random orthogonal rotation via Gram-Schmidt
  Matrix q(d, d);
  Rng rq(313);
  for (std::size_t i = 0; i < d; ++i) {
    Vec v(d);
    for (auto& x : v) x = rq.normal();
    for (std::size_t p = 0; p < i; ++p) {
      const double proj_coef = dot(v, q.row(p));
      for (std::size_t j = 0; j < d; ++j) v[j] -= proj_coef * q(p, j);
    }
    const double nv = norm2(v);
    for (std::size_t j = 0; j < d; ++j) q(i, j) = v[j] / nv;
  }
  std::vector<Vec> rotated(n, Vec(d));
  for (std::size_t i = 0; i < n; ++i) matvec(q, rows[i], rotated[i]);
  const Projection2D rot = pca_project(make_embeddings(rotated));
  for (int k = 0; k < 2; ++k)
    EXPECT_NEAR(rot.explained_variance[k], base.explained_variance[k], 1e-8);
}

TEST(Pca, DegenerateInputsRejected) {
  std::vector<Vec> constant_rows(5, Vec{1.0, 2.0, 3.0});
  EXPECT_THROW(pca_project(make_embeddings(constant_rows)), Error);
  std::vector<Vec> two_rows = {{1, 2}, {3, 4}};
  EXPECT_THROW(pca_project(make_embeddings(two_rows)), Error);
  std::vector<Vec> one_dim = {{1}, {2}, {3}};
  EXPECT_THROW(pca_project(make_embeddings(one_dim)), Error);
}

TEST(Scatter, TwoClassesGetTwoLegendEntries) {
  std::vector<Vec> rows = {{0, 0}, {1, 1}, {2, 0}, {3, 1}};
  Projection2D proj;
  proj.user_ids = {"a", "b", "c", "d"};
  proj.coords = Matrix(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    proj.coords(i, 0) = rows[i][0];
    proj.coords(i, 1) = rows[i][1];
  }
  ScatterLabels labels;
  labels.kind = ScatterLabels::Kind::kClass;
  labels.classes = {0, 1, 0, 1};
  labels.n_classes = 2;
  const std::string svg = render_scatter_svg(proj, labels);
  EXPECT_NE(svg.find("class 0"), std::string::npos);
  EXPECT_NE(svg.find("class 1"), std::string::npos);
  EXPECT_EQ(svg.find("class 2"), std::string::npos);
  std::size_t circles = 0, pos = 0;
  while ((pos = svg.find("<circle", pos)) != std::string::npos) {
    ++circles;
    pos += 7;
  }
  EXPECT_EQ(circles, 4u);
}

TEST(Scatter, DeterministicBytes) {
  Projection2D proj;
  proj.user_ids = {"a", "b", "c"};
  proj.coords = Matrix(3, 2);
  proj.coords(0, 0) = 0.1;
  proj.coords(1, 0) = -2.5;
  proj.coords(2, 1) = 7.0;
  ScatterLabels labels;
  labels.kind = ScatterLabels::Kind::kValue;
  labels.values = {0.0, 0.5, 1.0};
  testutil::TempDir dir("svg");
  emit_scatter(proj, labels, dir.file("a.svg"));
  emit_scatter(proj, labels, dir.file("b.svg"));
  const std::string a = testutil::slurp(dir.file("a.svg"));
  EXPECT_EQ(a, testutil::slurp(dir.file("b.svg")));
  EXPECT_NE(a.find("<svg"), std::string::npos);
  EXPECT_NE(a.find("min "), std::string::npos);
  EXPECT_NE(a.find("max "), std::string::npos);
}

TEST(Scatter, EmptyCanvasOmitsLegend) {
  Projection2D proj;
  proj.coords = Matrix(0, 2);
  ScatterLabels labels;
  labels.kind = ScatterLabels::Kind::kClass;
  labels.n_classes = 0;
  const std::string svg = render_scatter_svg(proj, labels);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("legend"), std::string::npos);
  EXPECT_EQ(svg.find("<circle"), std::string::npos);
}

TEST(Scatter, ErrorsOnBadLabels) {
  Projection2D proj;
  proj.user_ids = {"a", "b", "c"};
  proj.coords = Matrix(3, 2);
  ScatterLabels wrong_len;
  wrong_len.kind = ScatterLabels::Kind::kClass;
  wrong_len.classes = {0, 1};
  wrong_len.n_classes = 2;
  EXPECT_THROW(render_scatter_svg(proj, wrong_len), ShapeError);
  ScatterLabels too_many;
  too_many.kind = ScatterLabels::Kind::kClass;
  too_many.classes = {0, 1, 2};
  too_many.n_classes = 25;
  EXPECT_THROW(render_scatter_svg(proj, too_many), Error);
}
