#include <catch2/catch_amalgamated.hpp>

#include "ecoref/ecb_xml.hpp"

using namespace ecoref;

namespace {

// Two sentences; markable 21 covers sentence-0 tokens 3..4, markable 22 is a
// single token in sentence 1, markable 30 is an anchorless instance, 40 an
// entity.
const char* kDocXml = R"(<?xml version="1.0" encoding="UTF-8"?>
<Document doc_name="3_2ecb.xml">
  <token t_id="1" sentence="0" number="0">Police</token>
  <token t_id="2" sentence="0" number="1">have</token>
  <token t_id="3" sentence="0" number="2">finally</token>
  <token t_id="4" sentence="0" number="3">caught</token>
  <token t_id="5" sentence="0" number="4">up</token>
  <token t_id="6" sentence="1" number="0">The</token>
  <token t_id="7" sentence="1" number="1">arrest</token>
  <token t_id="8" sentence="1" number="2">followed</token>
  <Markables>
    <ACTION_OCCURRENCE m_id="21">
      <token_anchor t_id="4"/>
      <token_anchor t_id="5"/>
    </ACTION_OCCURRENCE>
    <ACTION_OCCURRENCE m_id="22">
      <token_anchor t_id="7"/>
    </ACTION_OCCURRENCE>
    <ACTION_OCCURRENCE m_id="30" instance_id="ACT123" TAG_DESCRIPTOR="t3_catch" />
    <HUMAN_PART_PER m_id="40">
      <token_anchor t_id="1"/>
    </HUMAN_PART_PER>
  </Markables>
  <Relations>
    <CROSS_DOC_COREF r_id="9001" note="ACT123">
      <source m_id="21"/>
      <source m_id="22"/>
      <target m_id="30"/>
    </CROSS_DOC_COREF>
  </Relations>
</Document>
)";

}  // namespace

TEST_CASE("ECB+ document maps tokens, markables, and relations") {
    EcbParseStats stats;
    Document doc = parse_ecb_document(kDocXml, "3_2ecb.xml", &stats);

    REQUIRE(doc.doc_id == "3_2ecb");
    REQUIRE(doc.topic == 3);
    REQUIRE(doc.sub_topic == SubTopic::ecb);
    REQUIRE(doc.sentences.size() == 2);
    REQUIRE(doc.sentences[0].tokens.size() == 5);
    REQUIRE(doc.sentences[0].tokens[3].text == "caught");
    REQUIRE(doc.sentences[0].tokens[3].lemma == "caught");
    REQUIRE(doc.sentences[0].tokens[3].pos == "UNK");

    // 2 anchored action markables; instance (30) dropped, entity (40) ignored
    REQUIRE(doc.mentions.size() == 2);
    REQUIRE(stats.dropped_markables == 1);
    const Mention& m1 = doc.mentions[0];
    REQUIRE(m1.sentence_index == 0);
    REQUIRE(m1.span.start == 3);
    REQUIRE(m1.span.end == 4);
    REQUIRE(m1.head_index == 4);  // no verbal POS, falls to last token

    SECTION("cross-doc relation labels both mentions") {
        for (const Mention& m : doc.mentions) {
            REQUIRE(m.cd_chain == "t3/ACT123");
            REQUIRE(m.wd_chain == "3_2ecb/ACT123");
        }
    }
}

TEST_CASE("intra-doc relations become WD chains with a doc-local CD label") {
    std::string xml = R"(<Document>
      <token t_id="1" sentence="0" number="0">was</token>
      <token t_id="2" sentence="0" number="1">shot</token>
      <token t_id="3" sentence="1" number="0">shooting</token>
      <Markables>
        <ACTION_OCCURRENCE m_id="1"><token_anchor t_id="2"/></ACTION_OCCURRENCE>
        <ACTION_OCCURRENCE m_id="2"><token_anchor t_id="3"/></ACTION_OCCURRENCE>
        <ACTION_OCCURRENCE m_id="3" TAG_DESCRIPTOR="intra" />
      </Markables>
      <Relations>
        <INTRA_DOC_COREF r_id="55">
          <source m_id="1"/>
          <source m_id="2"/>
          <target m_id="3"/>
        </INTRA_DOC_COREF>
      </Relations>
    </Document>)";
    Document doc = parse_ecb_document(xml, "7_1ecbplus.xml");
    REQUIRE(doc.sub_topic == SubTopic::ecbplus);
    REQUIRE(doc.mentions.size() == 2);
    REQUIRE(doc.mentions[0].wd_chain == "7_1ecbplus/r55");
    REQUIRE(doc.mentions[0].cd_chain == "t7/7_1ecbplus/r55");
    REQUIRE(doc.mentions[0].wd_chain == doc.mentions[1].wd_chain);
}

TEST_CASE("truncated XML is a parse error with no partial document") {
    std::string xml(kDocXml);
    xml.resize(xml.size() / 2);
    REQUIRE_THROWS_AS(parse_ecb_document(xml, "3_2ecb.xml"), XmlParseError);
}

TEST_CASE("mismatched tags report a byte offset") {
    try {
        parse_xml("<a><b></a>");
        FAIL("expected XmlParseError");
    } catch (const XmlParseError& e) {
        REQUIRE(e.offset > 0);
        REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("byte"));
    }
}

TEST_CASE("relations referencing unknown markables name the id") {
    std::string xml = R"(<Document>
      <token t_id="1" sentence="0" number="0">hit</token>
      <Markables>
        <ACTION_OCCURRENCE m_id="1"><token_anchor t_id="1"/></ACTION_OCCURRENCE>
      </Markables>
      <Relations>
        <CROSS_DOC_COREF r_id="1" note="X">
          <source m_id="1"/>
          <target m_id="99"/>
        </CROSS_DOC_COREF>
      </Relations>
    </Document>)";
    REQUIRE_THROWS_MATCHES(parse_ecb_document(xml, "1_1ecb.xml"), DataError,
                           Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("99")));
}

TEST_CASE("XML reader quirks: entities, bare ampersands, comments, CDATA") {
    XmlElement root = parse_xml(
        "<r a='1 &amp; 2'><!-- note --><t>AT&amp;T</t><t>Q &amp Z</t><t><![CDATA[x<y]]></t>"
        "<t>fish & chips</t></r>");
    REQUIRE(root.attr("a") != nullptr);
    REQUIRE(*root.attr("a") == "1 & 2");
    REQUIRE(root.children[0].text == "AT&T");
    REQUIRE(root.children[1].text == "Q &amp Z");  // not an entity: kept as-is
    REQUIRE(root.children[2].text == "x<y");
    REQUIRE(root.children[3].text == "fish & chips");  // bare ampersand tolerated
}

TEST_CASE("empty token text is repaired and counted") {
    std::string xml = R"(<Document>
      <token t_id="1" sentence="0" number="0"></token>
      <token t_id="2" sentence="0" number="1">ok</token>
    </Document>)";
    EcbParseStats stats;
    Document doc = parse_ecb_document(xml, "2_1ecb.xml", &stats);
    REQUIRE(stats.repaired_tokens == 1);
    REQUIRE(doc.sentences[0].tokens[0].text == "_");
    validate_corpus(Corpus{{doc}});
}

TEST_CASE("sentence numbers are remapped to contiguous indices") {
    std::string xml = R"(<Document>
      <token t_id="1" sentence="4" number="0">b</token>
      <token t_id="2" sentence="2" number="0">a</token>
    </Document>)";
    Document doc = parse_ecb_document(xml, "2_2ecb.xml");
    REQUIRE(doc.sentences.size() == 2);
    REQUIRE(doc.sentences[0].tokens[0].text == "a");
    REQUIRE(doc.sentences[1].tokens[0].text == "b");
}

TEST_CASE("document names must carry topic and sub-topic") {
    REQUIRE_THROWS_AS(parse_ecb_document("<d/>", "notaname.xml"), DataError);
    REQUIRE_THROWS_AS(parse_ecb_document("<d/>", "12_3.xml"), DataError);
}
