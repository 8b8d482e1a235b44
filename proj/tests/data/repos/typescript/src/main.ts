import { Store } from "./store";
import type { Item } from "./types";

// Adds one item and prints the count.
const store = new Store();
const item: Item = { id: "a", qty: 1 };
store.add(item);
console.log(store.count());
