#include <doctest.h>

#include <cmath>

#include "novascore/embedding.hpp"
#include "novascore/error.hpp"
#include "support.hpp"

using namespace novascore;

TEST_SUITE("embedding") {
  TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 12638187200555641996ULL);
    CHECK(fnv1a64("foobar") == 9625390261332436968ULL);
  }

  TEST_CASE("tokenizer lowercases ASCII and keeps non-ASCII bytes") {
    auto toks = hash_tokens("The Cat sat; the cat ran! Caf\xc3\xa9 42x");
    std::vector<std::string> want{"the", "cat", "sat", "the", "cat", "ran", "caf\xc3\xa9", "42x"};
    CHECK(toks == want);
  }

  TEST_CASE("hash embedder matches the frozen reference vector") {
    HashEmbedder e(256);
    auto v = e.embed({"The Cat sat; the cat ran! Caf\xc3\xa9 42x"}).at(0);
    REQUIRE(v.dim() == 256);
    const std::vector<std::pair<std::size_t, double>> nonzero{
        {39, 0.5773502691896258},  {118, 0.2886751345948129}, {124, 0.5773502691896258},
        {137, 0.2886751345948129}, {161, 0.2886751345948129}, {247, 0.2886751345948129}};
    std::size_t seen = 0;
    for (std::size_t i = 0; i < v.dim(); ++i) {
      if (v.values()[i] != 0.0) ++seen;
    }
    CHECK(seen == nonzero.size());
    for (auto [i, x] : nonzero) CHECK(v.values()[i] == doctest::Approx(x).epsilon(1e-15));
  }

  TEST_CASE("frozen cosine values between fixture sentences") {
    HashEmbedder e(256);
    auto vs = e.embed({"The port of Valmora closed its northern terminal for repairs.",
                       "The Cerro Alto copper mine reopened after a long two year closure.",
                       "The Cerro Alto copper mine reopened after a two year closure."});
    CHECK(cosine_similarity(vs[0], vs[1]) == doctest::Approx(0.16903085094570333).epsilon(1e-12));
    CHECK(cosine_similarity(vs[1], vs[2]) == doctest::Approx(0.9636241116594316).epsilon(1e-12));
    CHECK(cosine_similarity(vs[2], vs[2]) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("embeddings are unit length and deterministic") {
    HashEmbedder e(64, 2);
    std::vector<std::string> texts{"alpha beta", "gamma", "delta epsilon zeta", "eta", "theta"};
    auto a = e.embed(texts);
    auto b = e.embed(texts);
    REQUIRE(a.size() == texts.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      double n = 0;
      for (double x : a[i].values()) n += x * x;
      CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(testing::vec(a[i].values()) == testing::vec(b[i].values()));
    }
  }

  TEST_CASE("invalid inputs") {
    HashEmbedder e(32);
    CHECK_THROWS_AS(e.embed({}), Error);
    CHECK_THROWS_AS(e.embed({"  "}), Error);
    CHECK_THROWS_AS(e.embed({"..."}), Error);
    CHECK_THROWS_AS(EmbeddingVector::normalized({0.0, 0.0}), Error);
    CHECK_THROWS_AS(EmbeddingVector::from_unit({0.5, 0.5}), Error);
    HashEmbedder other(16);
    auto a = e.embed({"x"})[0];
    auto b = other.embed({"x"})[0];
    try {
      cosine_similarity(a, b);
      FAIL("expected DimensionMismatch");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::DimensionMismatch);
    }
  }

  TEST_CASE("embedder config validation") {
    EmbedderConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.kind = EmbedderKind::remote;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.endpoint = "http://127.0.0.1:1/embed";
    CHECK_NOTHROW(cfg.validate());
  }
}
