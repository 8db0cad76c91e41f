import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

/** Absolute path of a committed fixture, valid from the compiled dist tree. */
export function fixture(name: string): string {
  const here = dirname(fileURLToPath(import.meta.url));
  // compiled location is dist/test/; fixtures stay in test/fixtures/
  return join(here, "..", "..", "test", "fixtures", name);
}
