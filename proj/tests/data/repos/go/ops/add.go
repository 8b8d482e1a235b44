package ops

import "example.com/calc/internal/num"

// Add returns the clamped sum.
func Add(a, b int) int {
	return num.Clamp(a+b, -1000, 1000)
}
