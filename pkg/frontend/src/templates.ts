/**
 * Guided query templates and the Q&A demo catalog. Pure data: edit here
 * (or replace at build time) without touching any component code.
 */

export interface QueryTemplate {
  title: string;
  description: string;
  query: string;
}

export const GRAPH_EXPLORER_TEMPLATES: QueryTemplate[] = [
  {
    title: "EternalBlue subgraph",
    description:
      "Every known connection of CVE-2017-0144: products, vendor, weakness, domains, exploits, authors.",
    query: `MATCH (v:Vulnerability {cveID:"CVE-2017-0144"})
MATCH (v)-[:AFFECTS]->(p:Product)-[:BELONGS_TO]->(d:Vendor)
MATCH (v)-[:REFERS_TO]->(dom:Domain)
MATCH (v)-[:EXAMPLE_OF]->(w:Weakness)
MATCH (ex:Exploit)-[:EXPLOITS]->(v)<-[:WRITES]-(a:Author)
RETURN v, p, d, dom, w, ex, a;`,
  },
  {
    title: "One vulnerability",
    description: "Look up a CVE by id.",
    query: 'MATCH (v:Vulnerability {cveID:"CVE-2017-0144"}) RETURN v',
  },
  {
    title: "Products of a vendor",
    description: "Products grouped under one vendor node.",
    query: 'MATCH (p:Product)-[:BELONGS_TO]->(d:Vendor {name:"microsoft"}) RETURN p, d',
  },
  {
    title: "Exploits and their targets",
    description: "Exploit nodes with the vulnerabilities they target.",
    query: "MATCH (ex:Exploit)-[:EXPLOITS]->(v:Vulnerability) RETURN ex, v LIMIT 50",
  },
];

export const QA_DEMOS: QueryTemplate[] = [
  {
    title: "Recently published vulnerabilities",
    description: "CVEs published since the start of 2017, newest entries of the corpus.",
    query:
      'MATCH (v:Vulnerability) WHERE v.published >= "2017-01-01" ' +
      "RETURN v.cveID, v.published, v.description LIMIT 25",
  },
  {
    title: "Vendor-specific threat clusters",
    description: "Vulnerabilities clustered around one vendor's products.",
    query:
      'MATCH (v:Vulnerability)-[:AFFECTS]->(p:Product)-[:BELONGS_TO]->(d:Vendor {name:"microsoft"}) ' +
      "RETURN d, p, v",
  },
  {
    title: "Exploited vulnerabilities and authors",
    description: "Who wrote exploit code, and for which CVEs.",
    query:
      "MATCH (a:Author)-[:WRITES]->(ex:Exploit)-[:EXPLOITS]->(v:Vulnerability) " +
      "RETURN a.name, ex.exploitID, v.cveID",
  },
  {
    title: "Weakness classes with known exploits",
    description: "Weakness categories whose vulnerabilities have public exploits.",
    query:
      "MATCH (v:Vulnerability)-[:EXAMPLE_OF]->(w:Weakness) " +
      "MATCH (ex:Exploit)-[:EXPLOITS]->(v) RETURN w, v.cveID, ex.exploitID",
  },
  {
    title: "High-severity vulnerabilities",
    description: "CVEs carrying a HIGH legacy severity rating.",
    query:
      'MATCH (v:Vulnerability) WHERE v.v2severity = "HIGH" ' +
      "RETURN v.cveID, v.v3exploitabilityScore LIMIT 25",
  },
  {
    title: "Reference domains of a CVE",
    description: "External domains a vulnerability links out to.",
    query:
      'MATCH (v:Vulnerability {cveID:"CVE-2017-0144"})-[:REFERS_TO]->(dom:Domain) ' +
      "RETURN v.cveID, dom",
  },
];
