// test_corpus.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include "doctest.h"
#include "embstab/corpus.h"
#include "embstab/errors.h"
#include "test_support.h"

using namespace embstab;

namespace {

const char* kFixture =
    "[Calcium carbonate|calcium_carbonate] appears to be as effective as "
    "[aluminum hydroxide|aluminum_hydroxide] in binding dietary [phosphorus|phosphorus] "
    "in [hemodialysis|hemodialysis] patients.";

std::vector<std::string> words(const std::string& s) {
  return testing::split_sentences(s).at(0);
}

TaggedSentence parse(std::string_view line) {
  auto s = parse_tagged_line(line, 1);
  REQUIRE(s.has_value());
  return *s;
}

}  // namespace

TEST_CASE("cui2vec keeps words and replaces concepts by id") {
  CHECK(transform_cui2vec(parse(kFixture)) ==
        words("calcium_carbonate appears to be as effective as aluminum_hydroxide in binding "
              "dietary phosphorus in hemodialysis patients."));
}

TEST_CASE("nlm keeps only concept ids") {
  CHECK(transform_nlm(parse(kFixture)) ==
        std::vector<std::string>{"calcium_carbonate", "aluminum_hydroxide", "phosphorus", "hemodialysis"});
}

TEST_CASE("words mode restores running text") {
  CHECK(transform_words(parse(kFixture)) ==
        words("calcium carbonate appears to be as effective as aluminum hydroxide in binding "
              "dietary phosphorus in hemodialysis patients."));
  const auto plain = parse("the quick brown fox");
  CHECK(transform(plain, Mode::kWords) == words("the quick brown fox"));
  CHECK(transform(plain, Mode::kCui2vec) == words("the quick brown fox"));
  CHECK(transform(plain, Mode::kNlm).empty());
}

TEST_CASE("cui2vec preserves sentence length") {
  const auto s = parse("a [b c|X1] d [e|X2]");
  CHECK(transform_cui2vec(s).size() == s.tokens.size());
}

TEST_CASE("parser edge cases") {
  CHECK_FALSE(parse_tagged_line("", 1).has_value());
  CHECK_FALSE(parse_tagged_line("   \t ", 1).has_value());

  SUBCASE("separator splits at the last bar") {
    const auto s = parse("[a|b|C0001]");
    const auto& c = std::get<Concept>(s.tokens.at(0));
    CHECK(c.id == "C0001");
    CHECK(c.surface == "a|b");
  }
  SUBCASE("words are lowercased, ids are not") {
    const auto s = parse("Hello [World|C0001X]");
    CHECK(std::get<Word>(s.tokens[0]).surface == "hello");
    CHECK(std::get<Concept>(s.tokens[1]).id == "C0001X");
  }
  SUBCASE("adjacent concepts") {
    CHECK(transform_nlm(parse("[a|A][b|B]")) == std::vector<std::string>{"A", "B"});
  }
}

TEST_CASE("malformed markup carries the line number") {
  for (const char* bad : {"x [unclosed|C1", "x ] y", "[a [b|C1]|C2]", "[no separator]", "[a|]", "[a|C 1]"}) {
    CAPTURE(bad);
    try {
      parse_tagged_line(bad, 42);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 42);
      CHECK(std::string(e.what()).rfind("line 42:", 0) == 0);
    }
  }
}

TEST_CASE("streamed parsing reports the failing line and document breaks") {
  std::istringstream in("a b\n\n\nc [d|D]\n[bad\n");
  std::size_t breaks = 0;
  std::vector<std::size_t> lines;
  try {
    for_each_tagged_sentence(
        in, TagFormat{}, [&](TaggedSentence&& s) { lines.push_back(s.line); }, [&] { ++breaks; });
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  CHECK(lines == std::vector<std::size_t>{1, 4});
  CHECK(breaks == 1);
}

TEST_CASE("custom tag format") {
  const auto s = parse_tagged_line("x <y z#Q1> w", 1, TagFormat{'<', '#', '>'});
  REQUIRE(s);
  CHECK(transform_cui2vec(*s) == words("x Q1 w"));
}

TEST_CASE("modes parse by name") {
  CHECK(parse_mode("cui2vec") == Mode::kCui2vec);
  CHECK(parse_mode("nlm") == Mode::kNlm);
  CHECK(parse_mode("words") == Mode::kWords);
  CHECK_THROWS_AS(parse_mode("bogus"), InputError);
  for (Mode m : {Mode::kCui2vec, Mode::kNlm, Mode::kWords}) CHECK(parse_mode(mode_name(m)) == m);
}

TEST_CASE("token corpus round trip keeps documents and drops empty sentences") {
  std::istringstream in("[a|A] x\nplain words only\n\n[b|B] y [a|A]\n");
  const auto tagged = parse_tagged_text(in);
  const auto nlm = transform_corpus(tagged, Mode::kNlm);
  CHECK(nlm.sentences.size() == 2);
  CHECK(nlm.concepts == std::set<std::string>{"A", "B"});

  const auto cui = transform_corpus(tagged, Mode::kCui2vec);
  std::stringstream buf;
  write_token_corpus(buf, cui);
  const auto back = read_token_corpus(buf);
  CHECK(back.sentences == cui.sentences);
  CHECK(back.documents == cui.documents);
}

TEST_CASE("vocabulary counts, filters and orders tokens") {
  const auto sentences = testing::split_sentences("b a b c\nb a d\na b e e\n");
  const auto r = build_vocab(sentences, 2);
  const auto& v = r.vocabulary;
  REQUIRE(v.size() == 3);
  CHECK(v.token(0) == "b");
  CHECK(v.frequency(0) == 4);
  CHECK(v.token(1) == "a");
  CHECK(v.token(2) == "e");
  CHECK(v.total_tokens() == 11);
  CHECK(v.retained_tokens() == 9);
  CHECK_FALSE(v.find("c").has_value());
  CHECK(v.index_of("e") == 2);
  CHECK_THROWS_AS(v.index_of("zzz"), InputError);
  CHECK(r.stats.raw_frequency.at("c") == 1);

  SUBCASE("sharded counting matches serial counting") {
    const auto p = build_vocab(sentences, 2, 4);
    CHECK(p.vocabulary.serialize() == v.serialize());
  }
  SUBCASE("min_count 1 keeps every token") { CHECK(build_vocab(sentences, 1).vocabulary.size() == 5); }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_vocab(std::vector<std::vector<std::string>>{}, 1), InputError);
    CHECK_THROWS_AS(build_vocab(sentences, 0), InputError);
  }
}

TEST_CASE("vocabulary file round trip and fingerprint") {
  const auto v = build_vocab(testing::split_sentences("x y y z z z\n"), 1).vocabulary;
  std::stringstream buf;
  v.write(buf);
  const auto back = Vocabulary::read(buf);
  CHECK(back.serialize() == v.serialize());
  CHECK(back.fingerprint() == v.fingerprint());
  CHECK(v.fingerprint().size() == 64);

  const auto other = build_vocab(testing::split_sentences("x y y z z z z\n"), 1).vocabulary;
  CHECK(other.fingerprint() != v.fingerprint());

  std::istringstream bad("x\t0\t3\ny\t5\t1\n");
  CHECK_THROWS_AS(Vocabulary::read(bad), InputError);
}

TEST_CASE("encoding drops unknown tokens and empty sentences") {
  const auto v = build_vocab(testing::split_sentences("a a b\n"), 2).vocabulary;
  const auto enc = encode(testing::split_sentences("a b a\nb b\nq a\n"), v);
  CHECK(enc == EncodedCorpus{{0, 0}, {0}});
}
