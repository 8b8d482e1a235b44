// Shared item shape.
export interface Item {
  id: string;
  qty: number;
}
